#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rubriceval/model.hpp"

namespace rubriceval {

inline constexpr int kValidationRuns = 3;
inline constexpr int kExperimentRuns = 2;

// Everything an assessor may look at when judging one criterion.
struct ScoringRequest {
  std::string_view note_id;
  std::string_view rubric_id;
  std::size_t criterion_index = 0;
  std::int64_t run_index = 0;
  std::string_view note_content;
  const Criterion& criterion;
  const Case& context;
};

// Thrown by agents when the assessor could not be reached. The engine retries
// these; any other exception fails the run immediately.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-criterion assessor returning a satisfaction in [0,1]. Implementations
// must tolerate concurrent calls, or report a positive max_in_flight().
class ScoringAgent {
 public:
  virtual ~ScoringAgent() = default;
  virtual double satisfaction(const ScoringRequest& request) = 0;
  virtual std::string scorer_id() const = 0;
  // 0 means no limit.
  virtual std::size_t max_in_flight() const { return 0; }
};

// Deterministic offline assessor: fraction of a criterion's evidence phrases
// found in the note, case-insensitive, no stemming.
class ReferenceScorer final : public ScoringAgent {
 public:
  double satisfaction(const ScoringRequest& request) override;
  std::string scorer_id() const override { return "reference-v1"; }
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{50};
  double backoff_multiplier = 2.0;
};

using TimestampSource = std::function<std::string()>;

// ISO-8601 UTC, second resolution.
std::string utc_timestamp();

// (sum w_i s_i / sum w_i) * 100. Throws EmptyCriteria or LengthMismatch.
double compute_normalized_score(std::span<const double> satisfactions,
                                std::span<const std::int64_t> weights);

// Throws EmptyEvidence.
double reference_score(std::string_view note_content, const Criterion& criterion,
                       std::span<const std::string> evidence);

// One scoring run: every criterion assessed independently, then aggregated.
// Transport failures are retried per policy and then reported as
// AgentTransportFailure naming the run.
ScoreRecord score_run(const NoteOutput& note, const Rubric& rubric, ScoringAgent& agent,
                      std::int64_t run_index, const Case& context,
                      const RetryPolicy& policy = {},
                      const TimestampSource& now = utc_timestamp);

// n_runs records with run_index first_run_index.. first_run_index + n_runs - 1.
std::vector<ScoreRecord> score_note(const NoteOutput& note, const Rubric& rubric,
                                    ScoringAgent& agent, int n_runs, const Case& context,
                                    const RetryPolicy& policy = {},
                                    std::int64_t first_run_index = 0,
                                    const TimestampSource& now = utc_timestamp);

struct StabilityStat {
  std::string note_id;
  std::string rubric_id;
  std::size_t n_runs = 0;
  // Percentage points, max - min across runs.
  double score_range = 0.0;
};

StabilityStat stability_range(std::span<const ScoreRecord> records);

struct StabilitySummary {
  double median = 0.0;
  double mean = 0.0;
  double p95 = 0.0;
};

StabilitySummary stability_summary(std::span<const StabilityStat> stats);

}  // namespace rubriceval

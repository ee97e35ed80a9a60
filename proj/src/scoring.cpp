#include "rubriceval/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ctime>
#include <thread>

#include "rubriceval/error.hpp"
#include "rubriceval/stats.hpp"

namespace rubriceval {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::ranges::transform(out, out.begin(),
                         [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double assess_with_retry(ScoringAgent& agent, const ScoringRequest& request,
                         const RetryPolicy& policy) {
  auto backoff = policy.initial_backoff;
  const int attempts = std::max(1, policy.max_attempts);
  for (int attempt = 1;; ++attempt) {
    try {
      return agent.satisfaction(request);
    } catch (const TransportError& e) {
      if (attempt >= attempts) {
        throw EvalError(ErrorCode::AgentTransportFailure,
                        "run " + std::to_string(request.run_index) + " of note " +
                            std::string(request.note_id) + " / rubric " +
                            std::string(request.rubric_id) + " failed after " +
                            std::to_string(attempts) + " attempts: " + e.what());
      }
    }
    std::this_thread::sleep_for(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<std::int64_t>(static_cast<double>(backoff.count()) * policy.backoff_multiplier));
  }
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double compute_normalized_score(std::span<const double> satisfactions,
                                std::span<const std::int64_t> weights) {
  if (satisfactions.empty() || weights.empty()) {
    throw EvalError(ErrorCode::EmptyCriteria, "no criteria to aggregate");
  }
  if (satisfactions.size() != weights.size()) {
    throw EvalError(ErrorCode::LengthMismatch,
                    std::to_string(satisfactions.size()) + " satisfactions for " +
                        std::to_string(weights.size()) + " weights");
  }
  std::int64_t weight_sum = 0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 1) {
      throw EvalError(ErrorCode::WeightOutOfRange, "weight " + std::to_string(weights[i]));
    }
    const double s = satisfactions[i];
    if (!(s >= 0.0 && s <= 1.0)) {
      throw EvalError(ErrorCode::SatisfactionOutOfRange, "satisfaction " + std::to_string(s));
    }
    weight_sum += weights[i];
    weighted += static_cast<double>(weights[i]) * s;
  }
  // Clamp guards the last ulp when every s_i == 1.
  return std::clamp(weighted / static_cast<double>(weight_sum) * 100.0, 0.0, 100.0);
}

double reference_score(std::string_view note_content, const Criterion& criterion,
                       std::span<const std::string> evidence) {
  if (evidence.empty()) {
    throw EvalError(ErrorCode::EmptyEvidence, "criterion '" + criterion.text + "' has no evidence");
  }
  const auto haystack = lowercase(note_content);
  std::size_t hits = 0;
  for (const auto& e : evidence) {
    if (haystack.find(lowercase(e)) != std::string::npos) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(evidence.size());
}

double ReferenceScorer::satisfaction(const ScoringRequest& request) {
  return reference_score(request.note_content, request.criterion, request.criterion.evidence);
}

ScoreRecord score_run(const NoteOutput& note, const Rubric& rubric, ScoringAgent& agent,
                      std::int64_t run_index, const Case& context, const RetryPolicy& policy,
                      const TimestampSource& now) {
  if (note.case_id != rubric.case_id || note.case_id != context.case_id) {
    throw EvalError(ErrorCode::KeyMismatch, "note " + note.note_id + ", rubric " +
                                                rubric.rubric_id + " and case " +
                                                context.case_id + " disagree on case");
  }
  ScoreRecord record;
  record.note_id = note.note_id;
  record.rubric_id = rubric.rubric_id;
  record.run_index = run_index;
  record.scorer_id = agent.scorer_id();
  record.satisfactions.reserve(rubric.criteria.size());
  for (std::size_t i = 0; i < rubric.criteria.size(); ++i) {
    ScoringRequest request{note.note_id, rubric.rubric_id, i,       run_index,
                           note.content, rubric.criteria[i], context};
    const double s = assess_with_retry(agent, request, policy);
    if (!(s >= 0.0 && s <= 1.0)) {
      throw EvalError(ErrorCode::SatisfactionOutOfRange,
                      agent.scorer_id() + " returned " + std::to_string(s) + " for criterion " +
                          std::to_string(i) + " of rubric " + rubric.rubric_id);
    }
    record.satisfactions.push_back(s);
  }
  const auto weights = rubric.weights();
  record.normalized_score = compute_normalized_score(record.satisfactions, weights);
  record.created_at = now ? now() : std::string{};
  return record;
}

std::vector<ScoreRecord> score_note(const NoteOutput& note, const Rubric& rubric,
                                    ScoringAgent& agent, int n_runs, const Case& context,
                                    const RetryPolicy& policy, std::int64_t first_run_index,
                                    const TimestampSource& now) {
  if (n_runs < 1) throw EvalError(ErrorCode::TooFewRuns, "n_runs must be >= 1");
  std::vector<ScoreRecord> out;
  out.reserve(static_cast<std::size_t>(n_runs));
  for (int j = 0; j < n_runs; ++j) {
    out.push_back(score_run(note, rubric, agent, first_run_index + j, context, policy, now));
  }
  return out;
}

StabilityStat stability_range(std::span<const ScoreRecord> records) {
  if (records.size() < 2) {
    throw EvalError(ErrorCode::TooFewRuns,
                    "stability needs >= 2 runs, got " + std::to_string(records.size()));
  }
  const auto& first = records.front();
  double lo = first.normalized_score;
  double hi = first.normalized_score;
  for (const auto& r : records) {
    if (r.note_id != first.note_id || r.rubric_id != first.rubric_id) {
      throw EvalError(ErrorCode::MixedKeys, "records span more than one note-rubric pair");
    }
    lo = std::min(lo, r.normalized_score);
    hi = std::max(hi, r.normalized_score);
  }
  return {first.note_id, first.rubric_id, records.size(), hi - lo};
}

StabilitySummary stability_summary(std::span<const StabilityStat> stats) {
  if (stats.empty()) throw EvalError(ErrorCode::EmptyInput, "no stability stats");
  std::vector<double> ranges;
  ranges.reserve(stats.size());
  for (const auto& s : stats) ranges.push_back(s.score_range);
  return {stats::median(ranges), stats::mean(ranges), stats::nearest_rank(ranges, 0.95)};
}

}  // namespace rubriceval

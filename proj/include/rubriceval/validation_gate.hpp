#pragma once

#include <span>
#include <string>
#include <vector>

#include "rubriceval/model.hpp"
#include "rubriceval/scoring.hpp"

namespace rubriceval {

struct GateOutcome {
  double min_best = 0.0;
  double max_worst = 0.0;
  // min_best - max_worst; positive exactly when accepted.
  double separation_margin = 0.0;
  bool accepted = false;
};

// Accepts iff every run of the best note strictly beats every run of the
// worst note, i.e. max(worst) < min(best). Throws WrongRunCount unless both
// sides carry kValidationRuns scores.
GateOutcome evaluate_gate(std::span<const double> best_scores,
                          std::span<const double> worst_scores);

struct ValidationResult {
  std::string rubric_id;
  std::string best_note_id;
  std::string worst_note_id;
  std::vector<double> best_scores;
  std::vector<double> worst_scores;
  double min_best = 0.0;
  double max_worst = 0.0;
  double separation_margin = 0.0;
  // mean(best_scores) - mean(worst_scores)
  double discrimination_gap = 0.0;
  bool accepted = false;
  // The fresh scoring runs behind best_scores / worst_scores.
  std::vector<ScoreRecord> runs;
};

// Scores the author's best- and worst-labeled notes kValidationRuns times
// each and gates the rubric, moving it to validated or rejected. Any prior
// status is overwritten. Throws MissingLabel or LabelConflict.
ValidationResult run_validation(Rubric& rubric, const Case& context,
                                std::span<const NoteOutput> notes, ScoringAgent& agent,
                                const RetryPolicy& policy = {},
                                const TimestampSource& now = utc_timestamp);

double discrimination_gap(double best_score, double worst_score);

struct GapSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

GapSummary summarize_gaps(std::span<const double> gaps);

}  // namespace rubriceval

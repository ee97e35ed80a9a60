#include "rubriceval/validation_gate.hpp"

#include <algorithm>

#include "rubriceval/error.hpp"
#include "rubriceval/stats.hpp"

namespace rubriceval {

GateOutcome evaluate_gate(std::span<const double> best_scores,
                          std::span<const double> worst_scores) {
  constexpr auto runs = static_cast<std::size_t>(kValidationRuns);
  if (best_scores.size() != runs || worst_scores.size() != runs) {
    throw EvalError(ErrorCode::WrongRunCount,
                    "gate needs " + std::to_string(runs) + " runs per side, got " +
                        std::to_string(best_scores.size()) + " best / " +
                        std::to_string(worst_scores.size()) + " worst");
  }
  GateOutcome out;
  out.min_best = std::ranges::min(best_scores);
  out.max_worst = std::ranges::max(worst_scores);
  out.separation_margin = out.min_best - out.max_worst;
  out.accepted = out.max_worst < out.min_best;
  return out;
}

ValidationResult run_validation(Rubric& rubric, const Case& context,
                                std::span<const NoteOutput> notes, ScoringAgent& agent,
                                const RetryPolicy& policy, const TimestampSource& now) {
  const NoteOutput* best = nullptr;
  const NoteOutput* worst = nullptr;
  for (const auto& n : notes) {
    if (n.case_id != rubric.case_id) continue;
    if (n.has_label(LabelKind::Best, rubric.author_id)) {
      if (best && best != &n) {
        throw EvalError(ErrorCode::LabelConflict,
                        rubric.author_id + " labeled more than one best note");
      }
      best = &n;
    }
    if (n.has_label(LabelKind::Worst, rubric.author_id)) {
      if (worst && worst != &n) {
        throw EvalError(ErrorCode::LabelConflict,
                        rubric.author_id + " labeled more than one worst note");
      }
      worst = &n;
    }
  }
  if (!best || !worst) {
    throw EvalError(ErrorCode::MissingLabel,
                    "rubric " + rubric.rubric_id + ": author " + rubric.author_id +
                        " has no " + (best ? "worst" : "best") + " label in case " +
                        rubric.case_id);
  }
  if (best == worst || best->note_id == worst->note_id) {
    throw EvalError(ErrorCode::LabelConflict,
                    "rubric " + rubric.rubric_id + ": best and worst are the same note " +
                        best->note_id);
  }

  ValidationResult result;
  result.rubric_id = rubric.rubric_id;
  result.best_note_id = best->note_id;
  result.worst_note_id = worst->note_id;
  for (const NoteOutput* n : {best, worst}) {
    auto runs = score_note(*n, rubric, agent, kValidationRuns, context, policy, 0, now);
    auto& side = n == best ? result.best_scores : result.worst_scores;
    for (auto& r : runs) {
      side.push_back(r.normalized_score);
      result.runs.push_back(std::move(r));
    }
  }

  const auto gate = evaluate_gate(result.best_scores, result.worst_scores);
  result.min_best = gate.min_best;
  result.max_worst = gate.max_worst;
  result.separation_margin = gate.separation_margin;
  result.accepted = gate.accepted;
  result.discrimination_gap = discrimination_gap(stats::mean(result.best_scores),
                                                 stats::mean(result.worst_scores));
  rubric.status = gate.accepted ? RubricStatus::Validated : RubricStatus::Rejected;
  return result;
}

double discrimination_gap(double best_score, double worst_score) { return best_score - worst_score; }

GapSummary summarize_gaps(std::span<const double> gaps) {
  if (gaps.empty()) throw EvalError(ErrorCode::EmptyInput, "no discrimination gaps");
  return {gaps.size(), stats::mean(gaps), stats::median(gaps), stats::quantile(gaps, 0.25),
          stats::quantile(gaps, 0.75)};
}

}  // namespace rubriceval

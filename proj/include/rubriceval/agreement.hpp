#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rubriceval/model.hpp"
#include "rubriceval/stats.hpp"

namespace rubriceval {

// note_id -> rank, 1 = best, ties share the average of their positions.
using Ranking = std::map<std::string, double>;

struct CaseRanking {
  std::string case_id;
  std::string experiment_id;
  std::string rubric_id;
  RubricSource source = RubricSource::Clinician;
  Ranking ranks;
};

// Collapses repeated runs to one score per note by their mean.
std::map<std::string, double> mean_score_by_note(std::span<const ScoreRecord> records);

// Descending-score ranking. Throws EmptyInput.
Ranking rank_by_score(const std::map<std::string, double>& scores);

// Tie-corrected Kendall tau over the shared item set, O(n log n).
// Returns nullopt when either ranking is fully tied (or n < 2), since the
// denominator vanishes. Throws ItemSetMismatch.
std::optional<double> kendall_tau_b(const Ranking& a, const Ranking& b);

// Mean |rank_a - rank_b| over items. Throws ItemSetMismatch.
double mean_rank_difference(const Ranking& a, const Ranking& b);

enum class PairKind { ClinClin, ClinLlm };
std::string_view to_string(PairKind kind);

struct AgreementRecord {
  std::string case_id;
  std::string experiment_id;
  PairKind pair_kind = PairKind::ClinClin;
  std::string rubric_a;
  std::string rubric_b;
  std::optional<double> tau;
  double mean_rank_diff = 0.0;
  std::size_t n_notes = 0;
  // For clin_llm: index of the clinician rubric among the case's clinician
  // rubrics in rubric_id order.
  std::size_t clinician_slot = 0;
};

struct CaseAgreements {
  std::vector<AgreementRecord> records;
  // Non-empty when the case lacked two clinician rankings or an LLM ranking.
  std::vector<std::string> warnings;
};

// Every clinician pair becomes a clin_clin record and every clinician x LLM
// pair a clin_llm record; with two clinician rubrics and one LLM rubric that
// is 1 + 2 records. Rankings for other cases or experiments are rejected.
CaseAgreements pair_agreements(const std::string& case_id, const std::string& experiment_id,
                               std::span<const CaseRanking> rankings);

struct ConvergenceRow {
  std::string experiment_id;
  std::optional<double> clin_clin_median_tau;
  std::optional<double> clin_llm_median_tau;
  std::optional<double> delta;  // clin_llm - clin_clin
  std::size_t n_clin_clin = 0;
  std::size_t n_clin_llm = 0;
  std::size_t excluded_clin_clin = 0;
  std::size_t excluded_clin_llm = 0;
  std::optional<double> clin_clin_median_rank_diff;
  std::optional<double> clin_llm_median_rank_diff;
  // clin_llm median tau split by clinician_slot.
  std::vector<std::optional<double>> clin_llm_median_tau_by_slot;
};

// One row per experiment, in `experiment_order` when given (experiments not
// listed follow in id order). Undefined taus are excluded and counted.
std::vector<ConvergenceRow> convergence_table(std::span<const AgreementRecord> records,
                                              std::span<const std::string> experiment_order = {});

struct CeilingDiagnostics {
  std::size_t n_scores = 0;
  double stddev = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  std::size_t n_margins = 0;
  std::optional<stats::FiveNumber> margin_quantiles;
};

CeilingDiagnostics ceiling_diagnostics(std::span<const double> scores,
                                       std::span<const double> margins);

}  // namespace rubriceval

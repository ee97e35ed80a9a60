#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "rubriceval/model.hpp"
#include "rubriceval/stats.hpp"

namespace rubriceval {

struct ExperimentSummary {
  std::string experiment_id;
  std::size_t n_records = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double stddev = 0.0;
  stats::FiveNumber box;  // for external box plots
};

// Statistics over normalized_score of every record. Throws EmptyInput.
ExperimentSummary summarize_experiment(const std::string& experiment_id,
                                       std::span<const ScoreRecord> records);

// One clinician's best/worst pick within a case.
struct Labeling {
  std::string case_id;
  std::string labeler_id;
  std::string best_note_id;
  std::string worst_note_id;
  Vendor best_vendor = Vendor::Other;
  Vendor worst_vendor = Vendor::Other;
  std::set<Vendor> candidate_vendors;
};

// Pairs each labeler's best and worst notes per case. The candidate set is
// the case's notes from the best note's experiment. Labelers with only one of
// the two labels are skipped.
std::vector<Labeling> collect_labelings(std::span<const NoteOutput> notes);

struct VendorPreference {
  Vendor vendor = Vendor::Other;
  std::size_t times_evaluated = 0;
  std::size_t times_best = 0;
  std::size_t times_worst = 0;
  double pct_best = 0.0;
  double pct_worst = 0.0;
  double net_rate = 0.0;
};

struct VendorPreferenceReport {
  std::vector<VendorPreference> rows;
  std::vector<std::string> warnings;
};

double net_preference_rate(double pct_best, double pct_worst);

// Percentages are over labelings where the vendor had a candidate note. With
// both_present_only, only labelings offering both openai and anthropic notes
// count. Vendors never evaluated are dropped with a warning. Throws
// UnknownVendor if a picked vendor is missing from its candidate set.
VendorPreferenceReport vendor_preference(std::span<const Labeling> labelings,
                                         bool both_present_only = false);

}  // namespace rubriceval

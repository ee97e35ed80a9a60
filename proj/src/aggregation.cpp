#include "rubriceval/aggregation.hpp"

#include <map>

#include "rubriceval/error.hpp"

namespace rubriceval {

ExperimentSummary summarize_experiment(const std::string& experiment_id,
                                       std::span<const ScoreRecord> records) {
  if (records.empty()) {
    throw EvalError(ErrorCode::EmptyInput, "no score records for experiment " + experiment_id);
  }
  std::vector<double> scores;
  scores.reserve(records.size());
  for (const auto& r : records) scores.push_back(r.normalized_score);
  ExperimentSummary s;
  s.experiment_id = experiment_id;
  s.n_records = scores.size();
  s.box = stats::five_number(scores);
  s.median = s.box.median;
  s.q1 = s.box.q1;
  s.q3 = s.box.q3;
  s.stddev = stats::sample_stddev(scores);
  return s;
}

std::vector<Labeling> collect_labelings(std::span<const NoteOutput> notes) {
  // (case_id, labeler_id) -> best / worst
  std::map<std::pair<std::string, std::string>, std::pair<const NoteOutput*, const NoteOutput*>> picks;
  for (const auto& n : notes) {
    for (const auto& l : n.labels) {
      auto& slot = picks[{n.case_id, l.labeler_id}];
      (l.label == LabelKind::Best ? slot.first : slot.second) = &n;
    }
  }
  std::vector<Labeling> out;
  for (const auto& [key, pick] : picks) {
    const auto [best, worst] = pick;
    if (!best || !worst) continue;
    Labeling lab;
    lab.case_id = key.first;
    lab.labeler_id = key.second;
    lab.best_note_id = best->note_id;
    lab.worst_note_id = worst->note_id;
    lab.best_vendor = best->vendor;
    lab.worst_vendor = worst->vendor;
    for (const auto& n : notes) {
      if (n.case_id == best->case_id && n.experiment_id == best->experiment_id) {
        lab.candidate_vendors.insert(n.vendor);
      }
    }
    lab.candidate_vendors.insert(worst->vendor);
    out.push_back(std::move(lab));
  }
  return out;
}

double net_preference_rate(double pct_best, double pct_worst) { return pct_best - pct_worst; }

VendorPreferenceReport vendor_preference(std::span<const Labeling> labelings,
                                         bool both_present_only) {
  VendorPreferenceReport report;
  std::map<Vendor, VendorPreference> acc;
  for (const auto& l : labelings) {
    if (!l.candidate_vendors.contains(l.best_vendor) || !l.candidate_vendors.contains(l.worst_vendor)) {
      throw EvalError(ErrorCode::UnknownVendor, "labeling " + l.case_id + "/" + l.labeler_id +
                                                    " picks a vendor outside its candidates");
    }
    if (both_present_only && !(l.candidate_vendors.contains(Vendor::OpenAi) &&
                               l.candidate_vendors.contains(Vendor::Anthropic))) {
      continue;
    }
    for (Vendor v : l.candidate_vendors) {
      auto& p = acc[v];
      p.vendor = v;
      ++p.times_evaluated;
      if (l.best_vendor == v) ++p.times_best;
      if (l.worst_vendor == v) ++p.times_worst;
    }
  }
  for (Vendor v : {Vendor::OpenAi, Vendor::Anthropic, Vendor::Other}) {
    auto it = acc.find(v);
    if (it == acc.end()) {
      report.warnings.push_back("vendor " + std::string(to_string(v)) + " was never among candidates");
      continue;
    }
    auto p = it->second;
    const auto n = static_cast<double>(p.times_evaluated);
    p.pct_best = 100.0 * static_cast<double>(p.times_best) / n;
    p.pct_worst = 100.0 * static_cast<double>(p.times_worst) / n;
    p.net_rate = net_preference_rate(p.pct_best, p.pct_worst);
    report.rows.push_back(p);
  }
  return report;
}

}  // namespace rubriceval

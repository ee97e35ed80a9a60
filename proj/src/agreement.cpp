#include "rubriceval/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rubriceval/error.hpp"

namespace rubriceval {

namespace {

void require_same_items(const Ranking& a, const Ranking& b) {
  if (a.size() != b.size() ||
      !std::equal(a.begin(), a.end(), b.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw EvalError(ErrorCode::ItemSetMismatch, "rankings cover different notes");
  }
}

// Pairs tied within each run of equal values of `key` over [first, last).
template <typename It, typename Key>
std::int64_t tied_pairs(It first, It last, Key key) {
  std::int64_t ties = 0;
  while (first != last) {
    auto run_end = std::find_if(first, last, [&](const auto& v) { return key(v) != key(*first); });
    const auto t = static_cast<std::int64_t>(std::distance(first, run_end));
    ties += t * (t - 1) / 2;
    first = run_end;
  }
  return ties;
}

// Stable merge sort on ys, returning the number of inversions (strictly
// greater element placed before a smaller one).
std::int64_t count_swaps(std::vector<double>& ys, std::vector<double>& buf, std::size_t lo,
                         std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = count_swaps(ys, buf, lo, mid) + count_swaps(ys, buf, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (ys[j] < ys[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = ys[j++];
    } else {
      buf[k++] = ys[i++];
    }
  }
  while (i < mid) buf[k++] = ys[i++];
  while (j < hi) buf[k++] = ys[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi),
            ys.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

std::optional<double> median_of(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  return stats::median(values);
}

}  // namespace

std::string_view to_string(PairKind kind) {
  return kind == PairKind::ClinClin ? "clin_clin" : "clin_llm";
}

std::map<std::string, double> mean_score_by_note(std::span<const ScoreRecord> records) {
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& r : records) {
    auto& [sum, n] = acc[r.note_id];
    sum += r.normalized_score;
    ++n;
  }
  std::map<std::string, double> out;
  for (const auto& [id, sn] : acc) out.emplace(id, sn.first / static_cast<double>(sn.second));
  return out;
}

Ranking rank_by_score(const std::map<std::string, double>& scores) {
  if (scores.empty()) throw EvalError(ErrorCode::EmptyInput, "nothing to rank");
  std::vector<std::pair<double, const std::string*>> order;
  order.reserve(scores.size());
  for (const auto& [id, s] : scores) order.emplace_back(s, &id);
  std::ranges::stable_sort(order, std::greater<>{}, &std::pair<double, const std::string*>::first);

  Ranking ranks;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && order[j].first == order[i].first) ++j;
    // positions i+1 .. j share their average
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks.emplace(*order[k].second, avg);
    i = j;
  }
  return ranks;
}

std::optional<double> kendall_tau_b(const Ranking& a, const Ranking& b) {
  require_same_items(a, b);
  const std::size_t n = a.size();
  if (n < 2) return std::nullopt;

  std::vector<std::pair<double, double>> xy;
  xy.reserve(n);
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    xy.emplace_back(ia->second, ib->second);
  }
  std::ranges::sort(xy);

  const auto total = static_cast<std::int64_t>(n * (n - 1) / 2);
  const std::int64_t ties_x = tied_pairs(xy.begin(), xy.end(), [](const auto& p) { return p.first; });
  const std::int64_t ties_xy = tied_pairs(xy.begin(), xy.end(), [](const auto& p) { return p; });

  std::vector<double> ys(n);
  std::ranges::transform(xy, ys.begin(), [](const auto& p) { return p.second; });
  std::vector<double> buf(n);
  const std::int64_t swaps = count_swaps(ys, buf, 0, n);
  const std::int64_t ties_y = tied_pairs(ys.begin(), ys.end(), [](double v) { return v; });

  const std::int64_t denom_x = total - ties_x;
  const std::int64_t denom_y = total - ties_y;
  if (denom_x == 0 || denom_y == 0) return std::nullopt;

  // concordant - discordant
  const std::int64_t score = total - ties_x - ties_y + ties_xy - 2 * swaps;
  const double tau = static_cast<double>(score) /
                     std::sqrt(static_cast<double>(denom_x) * static_cast<double>(denom_y));
  return std::clamp(tau, -1.0, 1.0);
}

double mean_rank_difference(const Ranking& a, const Ranking& b) {
  require_same_items(a, b);
  if (a.empty()) throw EvalError(ErrorCode::EmptyInput, "empty rankings");
  double sum = 0.0;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    sum += std::abs(ia->second - ib->second);
  }
  return sum / static_cast<double>(a.size());
}

CaseAgreements pair_agreements(const std::string& case_id, const std::string& experiment_id,
                               std::span<const CaseRanking> rankings) {
  std::vector<const CaseRanking*> clinicians;
  std::vector<const CaseRanking*> llms;
  for (const auto& r : rankings) {
    if (r.case_id != case_id || r.experiment_id != experiment_id) {
      throw EvalError(ErrorCode::KeyMismatch, "ranking " + r.rubric_id + " belongs to " +
                                                  r.case_id + "/" + r.experiment_id);
    }
    (r.source == RubricSource::Clinician ? clinicians : llms).push_back(&r);
  }
  auto by_id = [](const CaseRanking* x, const CaseRanking* y) { return x->rubric_id < y->rubric_id; };
  std::ranges::sort(clinicians, by_id);
  std::ranges::sort(llms, by_id);

  CaseAgreements out;
  auto emit = [&](PairKind kind, const CaseRanking& x, const CaseRanking& y, std::size_t slot) {
    AgreementRecord rec;
    rec.case_id = case_id;
    rec.experiment_id = experiment_id;
    rec.pair_kind = kind;
    rec.rubric_a = x.rubric_id;
    rec.rubric_b = y.rubric_id;
    rec.tau = kendall_tau_b(x.ranks, y.ranks);
    rec.mean_rank_diff = mean_rank_difference(x.ranks, y.ranks);
    rec.n_notes = x.ranks.size();
    rec.clinician_slot = slot;
    out.records.push_back(std::move(rec));
  };
  for (std::size_t i = 0; i < clinicians.size(); ++i) {
    for (std::size_t j = i + 1; j < clinicians.size(); ++j) {
      emit(PairKind::ClinClin, *clinicians[i], *clinicians[j], i);
    }
  }
  for (std::size_t i = 0; i < clinicians.size(); ++i) {
    for (const auto* l : llms) emit(PairKind::ClinLlm, *clinicians[i], *l, i);
  }

  if (clinicians.size() < 2) {
    out.warnings.push_back("case " + case_id + " / " + experiment_id + ": " +
                           std::to_string(clinicians.size()) + " clinician ranking(s)");
  }
  if (llms.empty()) {
    out.warnings.push_back("case " + case_id + " / " + experiment_id + ": no LLM ranking");
  }
  return out;
}

std::vector<ConvergenceRow> convergence_table(std::span<const AgreementRecord> records,
                                              std::span<const std::string> experiment_order) {
  if (records.empty()) throw EvalError(ErrorCode::EmptyInput, "no agreement records");

  std::vector<std::string> order(experiment_order.begin(), experiment_order.end());
  std::set<std::string> present;
  for (const auto& r : records) present.insert(r.experiment_id);
  for (const auto& id : present) {
    if (std::ranges::find(order, id) == order.end()) order.push_back(id);
  }

  std::vector<ConvergenceRow> rows;
  for (const auto& exp : order) {
    if (!present.contains(exp)) continue;
    std::vector<double> cc, cl, cc_rd, cl_rd;
    std::map<std::size_t, std::vector<double>> by_slot;
    ConvergenceRow row;
    row.experiment_id = exp;
    for (const auto& r : records) {
      if (r.experiment_id != exp) continue;
      const bool clin = r.pair_kind == PairKind::ClinClin;
      (clin ? cc_rd : cl_rd).push_back(r.mean_rank_diff);
      if (!r.tau) {
        ++(clin ? row.excluded_clin_clin : row.excluded_clin_llm);
        continue;
      }
      (clin ? cc : cl).push_back(*r.tau);
      if (!clin) by_slot[r.clinician_slot].push_back(*r.tau);
    }
    row.n_clin_clin = cc.size();
    row.n_clin_llm = cl.size();
    row.clin_clin_median_tau = median_of(cc);
    row.clin_llm_median_tau = median_of(cl);
    if (row.clin_clin_median_tau && row.clin_llm_median_tau) {
      row.delta = *row.clin_llm_median_tau - *row.clin_clin_median_tau;
    }
    row.clin_clin_median_rank_diff = median_of(cc_rd);
    row.clin_llm_median_rank_diff = median_of(cl_rd);
    if (!by_slot.empty()) {
      row.clin_llm_median_tau_by_slot.resize(by_slot.rbegin()->first + 1);
      for (auto& [slot, taus] : by_slot) row.clin_llm_median_tau_by_slot[slot] = median_of(taus);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CeilingDiagnostics ceiling_diagnostics(std::span<const double> scores,
                                       std::span<const double> margins) {
  if (scores.empty()) throw EvalError(ErrorCode::EmptyInput, "no scores for ceiling diagnostics");
  CeilingDiagnostics d;
  d.n_scores = scores.size();
  d.stddev = stats::sample_stddev(scores);
  const auto five = stats::five_number(scores);
  d.q1 = five.q1;
  d.median = five.median;
  d.q3 = five.q3;
  d.iqr = five.q3 - five.q1;
  d.n_margins = margins.size();
  if (!margins.empty()) d.margin_quantiles = stats::five_number(margins);
  return d;
}

}  // namespace rubriceval

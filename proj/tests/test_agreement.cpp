#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rubriceval/agreement.hpp"
#include "rubriceval/error.hpp"

using namespace rubriceval;

namespace {

Ranking ranking(const std::vector<double>& v) {
  Ranking r;
  for (std::size_t i = 0; i < v.size(); ++i) r["n" + std::to_string(i)] = v[i];
  return r;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const EvalError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an EvalError";
  return ErrorCode::IoFailure;
}

CaseRanking cr(const std::string& rubric, RubricSource src, const std::vector<double>& ranks,
               const std::string& exp = "exp-1", const std::string& case_id = "case-a") {
  return {case_id, exp, rubric, src, ranking(ranks)};
}

}  // namespace

TEST(RankByScore, DescendingWithAverageTies) {
  EXPECT_EQ(rank_by_score({{"a", 95}, {"b", 80}, {"c", 60}}), (Ranking{{"a", 1}, {"b", 2}, {"c", 3}}));
  EXPECT_EQ(rank_by_score({{"a", 90}, {"b", 90}, {"c", 60}}), (Ranking{{"a", 1.5}, {"b", 1.5}, {"c", 3}}));
  EXPECT_EQ(code_of([] { rank_by_score({}); }), ErrorCode::EmptyInput);
}

TEST(RankByScore, RandomAgainstCountingOracle) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> d(0, 6);
  for (int k = 0; k < 100; ++k) {
    std::map<std::string, double> scores;
    for (int i = 0; i < 10; ++i) scores["n" + std::to_string(i)] = 12.5 * d(rng);
    const auto got = rank_by_score(scores);
    const auto want = oracle::average_ranks(scores);
    for (const auto& [id, r] : want) EXPECT_DOUBLE_EQ(got.at(id), r) << id;
  }
}

TEST(MeanScoreByNote, AveragesRuns) {
  const std::vector<ScoreRecord> recs{{"n1", "r", 0, {}, 80.0, "x", ""},
                                      {"n1", "r", 1, {}, 90.0, "x", ""},
                                      {"n2", "r", 0, {}, 10.0, "x", ""}};
  const auto m = mean_score_by_note(recs);
  EXPECT_DOUBLE_EQ(m.at("n1"), 85.0);
  EXPECT_DOUBLE_EQ(m.at("n2"), 10.0);
}

TEST(KendallTauB, IdentityReversalAndSwap) {
  EXPECT_DOUBLE_EQ(*kendall_tau_b(ranking({1, 2, 3, 4}), ranking({1, 2, 3, 4})), 1.0);
  EXPECT_DOUBLE_EQ(*kendall_tau_b(ranking({1, 2, 3, 4}), ranking({4, 3, 2, 1})), -1.0);
  EXPECT_NEAR(*kendall_tau_b(ranking({1, 2, 3, 4}), ranking({1, 3, 2, 4})), 4.0 / 6.0, 1e-12);
}

TEST(KendallTauB, FullyTiedIsUndefined) {
  EXPECT_FALSE(kendall_tau_b(ranking({2, 2, 2}), ranking({1, 2, 3})).has_value());
  EXPECT_FALSE(kendall_tau_b(ranking({1}), ranking({1})).has_value());
}

TEST(KendallTauB, ItemSetMismatch) {
  Ranking a{{"x", 1}, {"y", 2}}, b{{"x", 1}, {"z", 2}};
  EXPECT_EQ(code_of([&] { kendall_tau_b(a, b); }), ErrorCode::ItemSetMismatch);
  EXPECT_EQ(code_of([&] { mean_rank_difference(a, b); }), ErrorCode::ItemSetMismatch);
}

TEST(KendallTauB, RandomTiesAgainstPairOracle) {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> len(2, 25), val(0, 4);
  for (int k = 0; k < 500; ++k) {
    const int n = len(rng);
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) x[i] = val(rng), y[i] = val(rng);
    const double want = oracle::tau_b(x, y);
    const auto got = kendall_tau_b(ranking(x), ranking(y));
    if (std::isnan(want)) {
      EXPECT_FALSE(got.has_value());
    } else {
      ASSERT_TRUE(got.has_value());
      EXPECT_NEAR(*got, want, 1e-12);
    }
  }
}

TEST(MeanRankDifference, Examples) {
  EXPECT_EQ(mean_rank_difference(ranking({1, 2, 3}), ranking({1, 2, 3})), 0.0);
  EXPECT_NEAR(mean_rank_difference(ranking({1, 2, 3}), ranking({3, 2, 1})), 4.0 / 3.0, 1e-12);
}

TEST(MeanRankDifference, RandomAgainstLoop) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(1, 10);
  std::vector<double> a(10), b(10);
  for (int i = 0; i < 10; ++i) a[i] = u(rng), b[i] = u(rng);
  double sum = 0;
  for (int i = 0; i < 10; ++i) sum += std::abs(a[i] - b[i]);
  EXPECT_NEAR(mean_rank_difference(ranking(a), ranking(b)), sum / 10.0, 1e-12);
}

TEST(PairAgreements, FullCaseGivesThreeRecords) {
  const std::vector<CaseRanking> rs{cr("c1", RubricSource::Clinician, {1, 2, 3, 4, 5}),
                                    cr("c2", RubricSource::Clinician, {2, 1, 3, 4, 5}),
                                    cr("l1", RubricSource::Llm, {1, 2, 4, 3, 5})};
  const auto out = pair_agreements("case-a", "exp-1", rs);
  ASSERT_EQ(out.records.size(), 3u);
  EXPECT_TRUE(out.warnings.empty());
  EXPECT_EQ(out.records[0].pair_kind, PairKind::ClinClin);
  EXPECT_EQ(out.records[0].rubric_a, "c1");
  EXPECT_EQ(out.records[0].rubric_b, "c2");
  for (const auto& r : out.records) {
    const auto& a = std::ranges::find(rs, r.rubric_a, &CaseRanking::rubric_id)->ranks;
    const auto& b = std::ranges::find(rs, r.rubric_b, &CaseRanking::rubric_id)->ranks;
    EXPECT_EQ(r.tau, kendall_tau_b(a, b));
    EXPECT_EQ(r.mean_rank_diff, mean_rank_difference(a, b));
    EXPECT_EQ(r.n_notes, 5u);
  }
  EXPECT_EQ(out.records[1].clinician_slot, 0u);
  EXPECT_EQ(out.records[2].clinician_slot, 1u);
}

TEST(PairAgreements, MissingLlmWarns) {
  const std::vector<CaseRanking> rs{cr("c1", RubricSource::Clinician, {1, 2, 3}),
                                    cr("c2", RubricSource::Clinician, {1, 3, 2})};
  const auto out = pair_agreements("case-a", "exp-1", rs);
  ASSERT_EQ(out.records.size(), 1u);
  EXPECT_EQ(out.records[0].pair_kind, PairKind::ClinClin);
  EXPECT_EQ(out.warnings.size(), 1u);
}

TEST(PairAgreements, ForeignRankingRejected) {
  const std::vector<CaseRanking> rs{cr("c1", RubricSource::Clinician, {1, 2}, "exp-2")};
  EXPECT_EQ(code_of([&] { pair_agreements("case-a", "exp-1", rs); }), ErrorCode::KeyMismatch);
}

TEST(ConvergenceTable, SingleCaseMediansEqualItsValues) {
  const std::vector<CaseRanking> rs{cr("c1", RubricSource::Clinician, {1, 2, 3, 4}),
                                    cr("c2", RubricSource::Clinician, {1, 3, 2, 4}),
                                    cr("l1", RubricSource::Llm, {4, 3, 2, 1})};
  const auto recs = pair_agreements("case-a", "exp-1", rs).records;
  const auto rows = convergence_table(recs);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(*rows[0].clin_clin_median_tau, 4.0 / 6.0, 1e-12);
  const double cl = (*recs[1].tau + *recs[2].tau) / 2.0;
  EXPECT_NEAR(*rows[0].clin_llm_median_tau, cl, 1e-12);
  EXPECT_NEAR(*rows[0].delta, cl - 4.0 / 6.0, 1e-12);
}

TEST(ConvergenceTable, MediansMatchSortOracleAndExclusionsCounted) {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> val(0, 3);
  std::vector<AgreementRecord> recs;
  std::map<std::string, std::vector<double>> cc, cl;
  std::map<std::string, std::size_t> excluded;
  for (const std::string exp : {"exp-a", "exp-b"}) {
    for (int c = 0; c < 15; ++c) {
      std::vector<std::vector<double>> ranks(3, std::vector<double>(5));
      for (auto& v : ranks) {
        for (auto& x : v) x = val(rng);
      }
      if (c == 3) ranks[2].assign(5, 1.0);
      const std::vector<CaseRanking> rs{cr("c1", RubricSource::Clinician, ranks[0], exp, "case-" + std::to_string(c)),
                                        cr("c2", RubricSource::Clinician, ranks[1], exp, "case-" + std::to_string(c)),
                                        cr("l1", RubricSource::Llm, ranks[2], exp, "case-" + std::to_string(c))};
      for (auto& r : pair_agreements("case-" + std::to_string(c), exp, rs).records) {
        const double t = oracle::tau_b(std::vector<double>(r.rubric_a == "c1" ? ranks[0] : ranks[1]),
                                       r.rubric_b == "c2" ? ranks[1] : ranks[2]);
        if (std::isnan(t)) {
          excluded[exp + to_string(r.pair_kind).data()]++;
        } else {
          (r.pair_kind == PairKind::ClinClin ? cc : cl)[exp].push_back(t);
        }
        recs.push_back(std::move(r));
      }
    }
  }
  const std::vector<std::string> order{"exp-b", "exp-a"};
  const auto rows = convergence_table(recs, order);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].experiment_id, "exp-b");
  for (const auto& row : rows) {
    EXPECT_NEAR(*row.clin_clin_median_tau, oracle::sorted_quantile(cc[row.experiment_id], 0.5), 1e-12);
    EXPECT_NEAR(*row.clin_llm_median_tau, oracle::sorted_quantile(cl[row.experiment_id], 0.5), 1e-12);
    EXPECT_EQ(row.n_clin_clin, cc[row.experiment_id].size());
    EXPECT_EQ(row.n_clin_llm, cl[row.experiment_id].size());
    EXPECT_EQ(row.excluded_clin_llm, excluded[row.experiment_id + "clin_llm"]);
    EXPECT_GE(row.excluded_clin_llm, 2u);
  }
}

TEST(ConvergenceTable, EmptyInput) {
  EXPECT_EQ(code_of([] { convergence_table({}); }), ErrorCode::EmptyInput);
}

TEST(CeilingDiagnostics, ConstantAndSmall) {
  const std::vector<double> constant(20, 100.0);
  const auto d = ceiling_diagnostics(constant, {});
  EXPECT_EQ(d.stddev, 0.0);
  EXPECT_EQ(d.iqr, 0.0);
  EXPECT_FALSE(d.margin_quantiles.has_value());

  const std::vector<double> three{0, 50, 100};
  const std::vector<double> margins{5, 10, 20, 40};
  const auto e = ceiling_diagnostics(three, margins);
  EXPECT_EQ(e.median, 50.0);
  ASSERT_TRUE(e.margin_quantiles.has_value());
  EXPECT_EQ(e.n_margins, 4u);
  EXPECT_DOUBLE_EQ(e.margin_quantiles->median, 15.0);
  EXPECT_EQ(code_of([] { ceiling_diagnostics({}, {}); }), ErrorCode::EmptyInput);
}

TEST(CeilingDiagnostics, RandomAgainstTwoPassOracle) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 100);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> s(37 + k);
    for (auto& x : s) x = u(rng);
    const auto d = ceiling_diagnostics(s, {});
    EXPECT_NEAR(d.stddev, oracle::two_pass_stddev(s), 1e-9);
    EXPECT_NEAR(d.q1, oracle::sorted_quantile(s, 0.25), 1e-9);
    EXPECT_NEAR(d.q3, oracle::sorted_quantile(s, 0.75), 1e-9);
    EXPECT_NEAR(d.iqr, d.q3 - d.q1, 1e-12);
  }
}

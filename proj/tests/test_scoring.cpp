#include <gtest/gtest.h>

#include <thread>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <random>

#include "builders.hpp"
#include "oracles.hpp"
#include "rubriceval/batch.hpp"
#include "rubriceval/error.hpp"
#include "rubriceval/scoring.hpp"

using namespace rubriceval;
using namespace testing_support;

namespace {

const TimestampSource kFixedTime = [] { return std::string("2025-01-01T00:00:00Z"); };

RetryPolicy fast_retry(int attempts = 3) { return {attempts, std::chrono::milliseconds(0), 1.0}; }

class ConstantAgent : public ScoringAgent {
 public:
  explicit ConstantAgent(double v) : v_(v) {}
  double satisfaction(const ScoringRequest&) override { return v_; }
  std::string scorer_id() const override { return "constant"; }

 private:
  double v_;
};

// Fails with a transport error `failures` times per (note, criterion, run)
// before answering.
class FlakyAgent : public ScoringAgent {
 public:
  explicit FlakyAgent(int failures) : failures_(failures) {}
  double satisfaction(const ScoringRequest& r) override {
    std::lock_guard lock(mu_);
    auto& n = seen_[std::string(r.note_id) + "/" + std::to_string(r.criterion_index) + "/" +
                    std::to_string(r.run_index)];
    if (n++ < failures_) throw TransportError("connection reset");
    return 1.0;
  }
  std::string scorer_id() const override { return "flaky"; }

 private:
  int failures_;
  std::mutex mu_;
  std::map<std::string, int> seen_;
};

// Satisfaction depends on run_index and criterion so repeated runs differ.
class DriftingAgent : public ScoringAgent {
 public:
  double satisfaction(const ScoringRequest& r) override {
    const auto h = std::hash<std::string_view>{}(r.note_id);
    return static_cast<double>((h + 7 * r.run_index + 3 * r.criterion_index) % 11) / 10.0;
  }
  std::string scorer_id() const override { return "drift"; }
};

class ConcurrencyProbe : public ScoringAgent {
 public:
  explicit ConcurrencyProbe(std::size_t cap) : cap_(cap) {}
  double satisfaction(const ScoringRequest&) override {
    const int now = ++active_;
    int prev = peak_.load();
    while (now > prev && !peak_.compare_exchange_weak(prev, now)) {}
    std::this_thread::sleep_for(std::chrono::microseconds(200));
    --active_;
    return 0.5;
  }
  std::string scorer_id() const override { return "probe"; }
  std::size_t max_in_flight() const override { return cap_; }
  int peak() const { return peak_.load(); }

 private:
  std::size_t cap_;
  std::atomic<int> active_{0};
  std::atomic<int> peak_{0};
};

}  // namespace

TEST(NormalizedScore, Identity) {
  const std::vector<double> s{1.0};
  const std::vector<std::int64_t> w{1};
  EXPECT_DOUBLE_EQ(compute_normalized_score(s, w), 100.0);
}

TEST(NormalizedScore, WeightedExample) {
  const std::vector<double> s{1.0, 0.5, 0.0};
  const std::vector<std::int64_t> w{3, 2, 5};
  EXPECT_NEAR(compute_normalized_score(s, w), 40.0, 1e-12);
}

TEST(NormalizedScore, Errors) {
  const std::vector<double> s{1.0, 0.5};
  const std::vector<std::int64_t> w{3};
  EXPECT_THROW(
      {
        try {
          compute_normalized_score(s, w);
        } catch (const EvalError& e) {
          EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
          throw;
        }
      },
      EvalError);
  try {
    compute_normalized_score({}, {});
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCriteria);
  }
}

TEST(NormalizedScore, RandomAgainstNaiveSum) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> sat(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> weight(1, 5);
  std::uniform_int_distribution<int> len(1, 15);
  for (int k = 0; k < 200; ++k) {
    const int n = len(rng);
    std::vector<double> s(n);
    std::vector<std::int64_t> w(n);
    for (int i = 0; i < n; ++i) s[i] = sat(rng), w[i] = weight(rng);
    EXPECT_NEAR(compute_normalized_score(s, w), oracle::normalized_score(s, w), 1e-9);
  }
}

TEST(ReferenceScore, EvidenceFractions) {
  const Criterion c = crit("Reward for x", 1, CriterionKind::Other, {"alpha", "beta", "gamma", "delta"});
  EXPECT_DOUBLE_EQ(reference_score("ALPHA beta Gamma delta", c, c.evidence), 1.0);
  EXPECT_DOUBLE_EQ(reference_score("only beta here", c, c.evidence), 0.25);
  const std::vector<std::string> none;
  try {
    reference_score("x", c, none);
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyEvidence);
  }
}

TEST(ScoreNote, HandComputedMiniFixture) {
  // Criteria (weight: evidence found / listed):
  //   completeness 3: "cough improved" yes, "inhaler" no     -> 0.5
  //   non_rep      1: "interval update" yes                  -> 1
  //   item 0       2: yes                                    -> 1
  //   item 1       2: no                                     -> 0
  //   item 2       2: no                                     -> 0
  // S = (1.5 + 1 + 2) / 10 * 100 = 45
  const Case c = make_case("case-m");
  const Rubric r = make_rubric("case-m-clin-1", "case-m", RubricSource::Clinician, "clin-a", 3);
  const auto n = make_note("case-m-n01", "case-m", "Cough improved overall. Interval update only. Item 0 noted.");
  ReferenceScorer ref;
  const auto recs = score_note(n, r, ref, 1, c, {}, 0, kFixedTime);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_NEAR(recs[0].normalized_score, 45.0, 1e-12);
  EXPECT_EQ(recs[0].satisfactions, (std::vector<double>{0.5, 1.0, 1.0, 0.0, 0.0}));
  EXPECT_EQ(recs[0].scorer_id, "reference-v1");
}

TEST(ScoreNote, ReferenceScorerDeterministicAcrossRuns) {
  const Case c = make_case("case-m");
  const Rubric r = make_rubric("r", "case-m", RubricSource::Clinician, "a", 2);
  const auto n = make_note("n", "case-m", "cough improved with inhaler, item 1");
  ReferenceScorer ref;
  const auto recs = score_note(n, r, ref, 3, c, {}, 4, kFixedTime);
  ASSERT_EQ(recs.size(), 3u);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(recs[j].run_index, static_cast<std::int64_t>(4 + j));
    EXPECT_EQ(recs[j].normalized_score, recs[0].normalized_score);
  }
}

TEST(ScoreNote, OutOfRangeSatisfaction) {
  const Case c = make_case("case-m");
  const Rubric r = make_rubric("r", "case-m", RubricSource::Clinician, "a");
  const auto n = make_note("n", "case-m", "x");
  ConstantAgent bad(1.2);
  try {
    score_note(n, r, bad, 1, c);
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.code(), ErrorCode::SatisfactionOutOfRange);
  }
}

TEST(ScoreNote, CaseKeyMismatch) {
  const Case c = make_case("case-m");
  const Rubric r = make_rubric("r", "case-other", RubricSource::Clinician, "a");
  const auto n = make_note("n", "case-m", "x");
  ReferenceScorer ref;
  try {
    score_run(n, r, ref, 0, c);
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.code(), ErrorCode::KeyMismatch);
  }
}

TEST(Retry, RecoversWithinBudget) {
  const Case c = make_case("case-m");
  const Rubric r = make_rubric("r", "case-m", RubricSource::Clinician, "a");
  const auto n = make_note("n", "case-m", "x");
  FlakyAgent flaky(2);
  const auto rec = score_run(n, r, flaky, 0, c, fast_retry(3), kFixedTime);
  EXPECT_DOUBLE_EQ(rec.normalized_score, 100.0);
}

TEST(Retry, ExhaustedNamesTheRun) {
  const Case c = make_case("case-m");
  const Rubric r = make_rubric("r", "case-m", RubricSource::Clinician, "a");
  const auto n = make_note("n", "case-m", "x");
  FlakyAgent flaky(3);
  try {
    score_run(n, r, flaky, 5, c, fast_retry(3), kFixedTime);
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.code(), ErrorCode::AgentTransportFailure);
    EXPECT_NE(std::string(e.what()).find("run 5"), std::string::npos);
  }
}

TEST(Stability, Ranges) {
  auto rec = [](double s) { return ScoreRecord{"n", "r", 0, {}, s, "x", ""}; };
  const std::vector<ScoreRecord> two{rec(84.0), rec(84.0)};
  EXPECT_DOUBLE_EQ(stability_range(two).score_range, 0.0);
  const std::vector<ScoreRecord> three{rec(80.0), rec(88.0), rec(84.0)};
  EXPECT_DOUBLE_EQ(stability_range(three).score_range, 8.0);
  EXPECT_EQ(stability_range(three).n_runs, 3u);
}

TEST(Stability, Errors) {
  const std::vector<ScoreRecord> one{{"n", "r", 0, {}, 1.0, "x", ""}};
  try {
    stability_range(one);
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewRuns);
  }
  const std::vector<ScoreRecord> mixed{{"n", "r", 0, {}, 1.0, "x", ""}, {"n2", "r", 1, {}, 1.0, "x", ""}};
  try {
    stability_range(mixed);
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.code(), ErrorCode::MixedKeys);
  }
}

TEST(Stability, TenNotesTwoRunsMatchSortOracle) {
  const Case c = make_case("case-m");
  const Rubric r = make_rubric("r", "case-m", RubricSource::Clinician, "a", 3);
  DriftingAgent drift;
  for (int i = 0; i < 10; ++i) {
    const auto n = make_note("n" + std::to_string(i), "case-m", "text");
    const auto recs = score_note(n, r, drift, 2, c, {}, 0, kFixedTime);
    std::vector<double> s{recs[0].normalized_score, recs[1].normalized_score};
    std::sort(s.begin(), s.end());
    EXPECT_DOUBLE_EQ(stability_range(recs).score_range, s.back() - s.front());
  }
}

TEST(StabilitySummary, Examples) {
  auto stat = [](double r) { return StabilityStat{"n", "r", 2, r}; };
  std::vector<StabilityStat> zeros(5, stat(0.0));
  const auto z = stability_summary(zeros);
  EXPECT_EQ(z.median, 0.0);
  EXPECT_EQ(z.mean, 0.0);
  EXPECT_EQ(z.p95, 0.0);

  std::vector<StabilityStat> tail(9, stat(0.0));
  tail.push_back(stat(10.0));
  const auto t = stability_summary(tail);
  EXPECT_DOUBLE_EQ(t.median, 0.0);
  EXPECT_DOUBLE_EQ(t.mean, 1.0);
  EXPECT_DOUBLE_EQ(t.p95, 10.0);

  std::vector<StabilityStat> single{stat(3.5)};
  const auto s = stability_summary(single);
  EXPECT_EQ(s.median, 3.5);
  EXPECT_EQ(s.mean, 3.5);
  EXPECT_EQ(s.p95, 3.5);

  try {
    stability_summary({});
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
}

class BatchTest : public ::testing::Test {
 protected:
  void SetUp() override {
    c = make_case("case-m");
    rubrics = {make_rubric("r1", "case-m", RubricSource::Clinician, "a", 2),
               make_rubric("r2", "case-m", RubricSource::Llm, "o3", 3)};
    for (int i = 0; i < 12; ++i) {
      notes.push_back(make_note("n" + std::to_string(i), "case-m",
                                i % 2 ? "cough improved, item 0" : "inhaler, interval update, item 1"));
    }
    for (const auto& n : notes) {
      for (const auto& r : rubrics) {
        for (int j = 0; j < 3; ++j) tasks.push_back({&n, &r, &c, j});
      }
    }
    std::reverse(tasks.begin(), tasks.end());
  }

  Case c;
  std::vector<Rubric> rubrics;
  std::vector<NoteOutput> notes;
  std::vector<ScoreTask> tasks;
};

TEST_F(BatchTest, WorkerCountDoesNotChangeOutput) {
  ReferenceScorer ref;
  const auto one = score_batch(tasks, ref, 1, {}, kFixedTime);
  const auto many = score_batch(tasks, ref, 8, {}, kFixedTime);
  ASSERT_EQ(one.records.size(), tasks.size());
  EXPECT_EQ(one.records, many.records);
  EXPECT_TRUE(std::ranges::is_sorted(one.records, {}, [](const ScoreRecord& r) {
    return std::tie(r.note_id, r.rubric_id, r.run_index);
  }));
}

TEST_F(BatchTest, FailuresAreCollectedNotFatal) {
  FlakyAgent flaky(10);
  rubrics[0].criteria[0].weight = 1;
  auto partial = tasks;
  partial.resize(4);
  const auto res = score_batch(partial, flaky, 2, fast_retry(2), kFixedTime);
  EXPECT_TRUE(res.records.empty());
  ASSERT_EQ(res.failures.size(), 4u);
  for (const auto& f : res.failures) EXPECT_EQ(f.code, ErrorCode::AgentTransportFailure);
}

TEST_F(BatchTest, MaxInFlightCapsConcurrency) {
  ConcurrencyProbe probe(2);
  const auto res = score_batch(tasks, probe, 16, {}, kFixedTime);
  EXPECT_EQ(res.records.size(), tasks.size());
  EXPECT_LE(probe.peak(), 2);
}

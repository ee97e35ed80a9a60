#include <gtest/gtest.h>

#include "builders.hpp"
#include "rubriceval/codec.hpp"
#include "rubriceval/error.hpp"
#include "rubriceval/validate.hpp"

using namespace rubriceval;
using namespace testing_support;

namespace {

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const EvalError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an EvalError";
  return ErrorCode::IoFailure;
}

nlohmann::json case_json(int turns) {
  nlohmann::json t = nlohmann::json::array();
  for (int i = 0; i < turns; ++i) {
    t.push_back({{"speaker", i % 2 ? "patient" : "clinician"}, {"text", "turn " + std::to_string(i)}});
  }
  return {{"case_id", "case-a"},
          {"transcript", t},
          {"context", {{"conditions", {"asthma"}}, {"medications", nlohmann::json::array()}}},
          {"tags",
           {{"specialty", "primary care"},
            {"encounter_type", "follow-up"},
            {"length", "medium"},
            {"problem_count", "multi"},
            {"acuity", "moderate"}}},
          {"provenance", "real"}};
}

nlohmann::json rubric_json(const std::string& source, int n, bool completeness = true, bool non_rep = true) {
  nlohmann::json crit = nlohmann::json::array();
  int i = 0;
  if (completeness) crit.push_back({{"text", "Reward for a complete note"}, {"weight", 3}, {"kind", "completeness"}}), ++i;
  if (non_rep) crit.push_back({{"text", "Reward for not repeating the chart"}, {"weight", 2}, {"kind", "non_repetition"}}), ++i;
  for (; i < n; ++i) {
    crit.push_back({{"text", "Reward for item " + std::to_string(i)}, {"weight", 1}, {"kind", "other"}});
  }
  return {{"rubric_id", "r-1"}, {"case_id", "case-a"}, {"source", source}, {"author_id", "a"}, {"criteria", crit}};
}

}  // namespace

TEST(ValidateCase, WellFormed37TurnsAccepted) {
  const Case c = validate_case(case_json(37));
  EXPECT_EQ(c.transcript.size(), 37u);
  EXPECT_EQ(c.tags.length, EncounterLength::Medium);
  EXPECT_EQ(c.tags.acuity, Acuity::Moderate);
  EXPECT_FALSE(c.point_in_time_note.has_value());
  EXPECT_EQ(c.context.conditions, std::vector<std::string>{"asthma"});
}

TEST(ValidateCase, EmptyTranscript) {
  EXPECT_EQ(code_of([] { validate_case(case_json(0)); }), ErrorCode::EmptyTranscript);
}

TEST(ValidateCase, UnknownAcuity) {
  auto j = case_json(3);
  j["tags"]["acuity"] = "extreme";
  EXPECT_EQ(code_of([&] { validate_case(j); }), ErrorCode::InvalidTag);
}

TEST(ValidateCase, RoundTripsThroughCodec) {
  auto j = case_json(4);
  j["point_in_time_note"] = "Prior note.";
  const Case c = validate_case(j);
  EXPECT_EQ(validate_case(nlohmann::json::parse(to_json(c).dump())), c);
}

TEST(ValidateRubric, LlmFiveCriteriaAccepted) {
  const Rubric r = validate_rubric_structure(rubric_json("llm", 5));
  EXPECT_EQ(r.source, RubricSource::Llm);
  EXPECT_EQ(r.criteria.size(), 5u);
  EXPECT_EQ(r.total_weight(), 3 + 2 + 1 + 1 + 1);
}

TEST(ValidateRubric, LlmSevenCriteriaIsCountViolation) {
  try {
    validate_rubric_structure(rubric_json("llm", 7));
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.code(), ErrorCode::CriterionCountViolation);
    EXPECT_NE(std::string(e.what()).find("llm"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("7"), std::string::npos);
  }
}

TEST(ValidateRubric, LlmCountBounds) {
  EXPECT_EQ(code_of([] { validate_rubric_structure(rubric_json("llm", 3)); }), ErrorCode::CriterionCountViolation);
  for (int n : {4, 5, 6}) EXPECT_NO_THROW(validate_rubric_structure(rubric_json("llm", n)));
}

TEST(ValidateRubric, ClinicianCountBounds) {
  EXPECT_NO_THROW(validate_rubric_structure(rubric_json("clinician", 15)));
  EXPECT_EQ(code_of([] { validate_rubric_structure(rubric_json("clinician", 16)); }),
            ErrorCode::CriterionCountViolation);
}

TEST(ValidateRubric, ClinicianWithoutCompletenessNamesKind) {
  try {
    validate_rubric_structure(rubric_json("clinician", 3, false, true));
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingMandatedCriterion);
    EXPECT_NE(std::string(e.what()).find("completeness"), std::string::npos);
  }
}

TEST(ValidateRubric, DuplicateMandatedKind) {
  auto j = rubric_json("clinician", 3);
  j["criteria"][2]["kind"] = "completeness";
  EXPECT_EQ(code_of([&] { validate_rubric_structure(j); }), ErrorCode::DuplicateMandatedCriterion);
}

TEST(ValidateRubric, PrefixAndWeight) {
  auto j = rubric_json("clinician", 3);
  j["criteria"][2]["text"] = "Penalize missing items";
  EXPECT_EQ(code_of([&] { validate_rubric_structure(j); }), ErrorCode::BadCriterionPrefix);
  j = rubric_json("clinician", 3);
  j["criteria"][2]["weight"] = 0;
  EXPECT_EQ(code_of([&] { validate_rubric_structure(j); }), ErrorCode::WeightOutOfRange);
}

TEST(ValidateRubric, IdempotentOnDecodedRubric) {
  const Rubric r = validate_rubric_structure(rubric_json("llm", 5));
  const Rubric& again = validate_rubric_structure(r);
  EXPECT_EQ(again, r);
  EXPECT_EQ(validate_rubric_structure(nlohmann::json::parse(to_json(r).dump())), r);
}

TEST(Labels, TwoBestPicksByOneLabelerConflict) {
  auto a = make_note("n1", "c", "x");
  auto b = make_note("n2", "c", "y");
  a.labels.push_back({LabelKind::Best, "clin-a"});
  b.labels.push_back({LabelKind::Best, "clin-a"});
  std::vector<NoteOutput> notes{a, b};
  EXPECT_EQ(code_of([&] { check_label_invariants(notes); }), ErrorCode::LabelConflict);
}

TEST(Labels, BestAndWorstOnSameNoteConflict) {
  auto a = make_note("n1", "c", "x");
  a.labels = {{LabelKind::Best, "clin-a"}, {LabelKind::Worst, "clin-a"}};
  std::vector<NoteOutput> notes{a};
  EXPECT_EQ(code_of([&] { check_label_invariants(notes); }), ErrorCode::LabelConflict);
}

TEST(Labels, DifferentLabelersMayShareANote) {
  auto a = make_note("n1", "c", "x");
  auto b = make_note("n2", "c", "y");
  a.labels = {{LabelKind::Best, "clin-a"}, {LabelKind::Best, "clin-b"}};
  b.labels = {{LabelKind::Worst, "clin-a"}, {LabelKind::Worst, "clin-b"}};
  std::vector<NoteOutput> notes{a, b};
  EXPECT_NO_THROW(check_label_invariants(notes));
  EXPECT_TRUE(a.has_label(LabelKind::Best, "clin-b"));
  EXPECT_FALSE(a.has_label(LabelKind::Worst, "clin-b"));
}

TEST(Codec, NoteAndScoreRoundTrip) {
  auto n = make_note("n1", "c", "content", Vendor::Anthropic);
  n.labels = {{LabelKind::Worst, "clin-z"}};
  EXPECT_EQ(note_from_json(nlohmann::json::parse(to_json(n).dump())), n);

  ScoreRecord s{"n1", "r1", 3, {0.25, 1.0, 1.0 / 3.0}, 61.0 / 3.0, "reference-v1", "2025-01-01T00:00:00Z"};
  EXPECT_EQ(score_from_json(nlohmann::json::parse(to_json(s).dump())), s);
}

TEST(Codec, UnknownVendorRejected) {
  auto j = nlohmann::json::parse(to_json(make_note("n1", "c", "x")).dump());
  j["vendor"] = "acme";
  EXPECT_EQ(code_of([&] { note_from_json(j); }), ErrorCode::UnknownVendor);
}

TEST(Codec, FormatRealIsShortestRoundTrip) {
  EXPECT_EQ(format_real(40.0), "40");
  EXPECT_EQ(format_real(0.1), "0.1");
  const double third = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_real(third)), third);
}

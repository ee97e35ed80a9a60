#include <gtest/gtest.h>

#include "builders.hpp"
#include "rubriceval/dataset.hpp"
#include "rubriceval/error.hpp"
#include "rubriceval/generation.hpp"

using namespace rubriceval;
using namespace testing_support;

namespace {

const std::string kTemplate =
    "Judge documentation fidelity.\nT:\n{{transcript}}\nL:\n{{context}}\nN:\n{{point_in_time_note}}\nS:\n{{schema}}\n";

std::string criteria_json(int n, bool non_rep = true) {
  std::string out = R"({"criteria": [{"text": "Reward for completeness", "weight": 3, "kind": "completeness", "evidence": ["a"]})";
  int i = 1;
  if (non_rep) {
    out += R"(, {"text": "Reward for no repetition", "weight": 2, "kind": "non_repetition", "evidence": ["b"]})";
    ++i;
  }
  for (; i < n; ++i) {
    out += R"(, {"text": "Reward for item )" + std::to_string(i) + R"(", "weight": 1, "kind": "other", "evidence": ["c"]})";
  }
  return out + "]}";
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

// Returns scripted responses in order, then repeats the last one.
class ScriptedPort : public CompletionPort {
 public:
  explicit ScriptedPort(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  Completion complete(std::string_view, std::string_view prompt, std::string_view schema) override {
    prompts.emplace_back(prompt);
    last_schema = schema;
    const auto i = std::min(prompts.size() - 1, replies_.size() - 1);
    return {replies_[i], {100, 10 * static_cast<std::int64_t>(prompts.size())}};
  }
  std::string model_id() const override { return "test-model"; }

  std::vector<std::string> prompts;
  std::string last_schema;

 private:
  std::vector<std::string> replies_;
};

}  // namespace

TEST(AssemblePrompt, AllSectionsInTemplateOrder) {
  const Case c = make_case("case-g");
  const auto p = assemble_prompt(c, kTemplate);
  const auto t = p.find("clinician: How is the cough?");
  const auto l = p.find("Conditions: asthma");
  const auto n = p.find("Prior note: asthma, on albuterol.");
  const auto s = p.find("\"minItems\": 4");
  ASSERT_NE(t, std::string::npos);
  ASSERT_NE(l, std::string::npos);
  ASSERT_NE(n, std::string::npos);
  ASSERT_NE(s, std::string::npos);
  EXPECT_LT(t, l);
  EXPECT_LT(l, n);
  EXPECT_LT(n, s);
  EXPECT_NE(p.find("Allergies: none recorded"), std::string::npos);
  EXPECT_EQ(p.find("{{"), std::string::npos);
}

TEST(AssemblePrompt, MissingPriorNoteUsesMarker) {
  const auto p = assemble_prompt(make_case("case-g", false), kTemplate);
  EXPECT_NE(p.find(kNoPriorNoteMarker), std::string::npos);
}

TEST(AssemblePrompt, MissingTranscriptSlot) {
  EXPECT_EQ(code_of([] { assemble_prompt(make_case(), "documentation fidelity {{context}} {{point_in_time_note}}"); }),
            ErrorCode::UnfilledSlot);
}

TEST(AssemblePrompt, UnknownSlotAndMissingInstruction) {
  EXPECT_EQ(code_of([] {
              assemble_prompt(make_case(),
                              "documentation fidelity {{transcript}} {{context}} {{point_in_time_note}} {{extra}}");
            }),
            ErrorCode::UnfilledSlot);
  EXPECT_EQ(code_of([] { assemble_prompt(make_case(), "{{transcript}} {{context}} {{point_in_time_note}}"); }),
            ErrorCode::UnfilledSlot);
}

TEST(AssemblePrompt, SlotTextInsideCaseContentIsLeftAlone) {
  Case c = make_case();
  c.transcript[0].text = "literal {{context}} in speech";
  const auto p = assemble_prompt(c, kTemplate);
  EXPECT_NE(p.find("literal {{context}} in speech"), std::string::npos);
}

TEST(AssemblePrompt, ShippedTemplateIsComplete) {
  const auto tmpl = read_text(std::filesystem::path(RUBRICEVAL_DATA_DIR) / "templates" / "rubric_generation.txt");
  EXPECT_NO_THROW(assemble_prompt(make_case(), tmpl));
}

TEST(ParseGeneratedRubric, FiveCriteriaAccepted) {
  const Rubric r = parse_generated_rubric(criteria_json(5), "case-g", "o3");
  EXPECT_EQ(r.source, RubricSource::Llm);
  EXPECT_EQ(r.status, RubricStatus::Validated);
  EXPECT_EQ(r.rubric_id, "case-g-llm-o3");
  EXPECT_EQ(r.author_id, "o3");
  EXPECT_EQ(r.criteria.size(), 5u);
}

TEST(ParseGeneratedRubric, FencedAndProseWrapped) {
  EXPECT_NO_THROW(parse_generated_rubric("Here you go:\n```json\n" + criteria_json(4) + "\n```\n", "c", "m"));
  EXPECT_NO_THROW(parse_generated_rubric("Sure. " + criteria_json(6) + " Hope this helps.", "c", "m"));
}

TEST(ParseGeneratedRubric, ThreeCriteriaIsCountViolation) {
  EXPECT_EQ(code_of([] { parse_generated_rubric(criteria_json(3), "c", "m"); }),
            ErrorCode::CriterionCountViolation);
}

TEST(ParseGeneratedRubric, MissingNonRepetition) {
  EXPECT_EQ(code_of([] { parse_generated_rubric(criteria_json(5, false), "c", "m"); }),
            ErrorCode::MissingMandatedCriterion);
}

TEST(ParseGeneratedRubric, Unparseable) {
  EXPECT_EQ(code_of([] { parse_generated_rubric("I cannot help with that.", "c", "m"); }),
            ErrorCode::UnparseableResponse);
  EXPECT_EQ(code_of([] { parse_generated_rubric("{\"criteria\": [", "c", "m"); }), ErrorCode::UnparseableResponse);
}

TEST(GenerateRubric, FirstAttempt) {
  ScriptedPort port({criteria_json(5)});
  const auto g = generate_rubric(make_case("case-g"), port, kTemplate, 3);
  EXPECT_EQ(g.request.attempts, 1);
  EXPECT_EQ(g.request.token_usage.input_tokens, 100);
  EXPECT_EQ(g.request.token_usage.output_tokens, 10);
  EXPECT_EQ(g.request.model_id, "test-model");
  EXPECT_EQ(port.last_schema, rubric_output_schema());
}

TEST(GenerateRubric, InvalidThenValidSumsTokens) {
  ScriptedPort port({criteria_json(3), criteria_json(5)});
  const auto g = generate_rubric(make_case("case-g"), port, kTemplate, 3);
  EXPECT_EQ(g.request.attempts, 2);
  EXPECT_EQ(g.request.token_usage.input_tokens, 200);
  EXPECT_EQ(g.request.token_usage.output_tokens, 10 + 20);
  ASSERT_EQ(port.prompts.size(), 2u);
  EXPECT_NE(port.prompts[1].find("CriterionCountViolation"), std::string::npos);
  EXPECT_EQ(port.prompts[1].rfind(port.prompts[0], 0), 0u);
}

TEST(GenerateRubric, AlwaysInvalidExhausts) {
  ScriptedPort port({criteria_json(7)});
  try {
    generate_rubric(make_case("case-g"), port, kTemplate, 3);
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.code(), ErrorCode::GenerationExhausted);
    EXPECT_NE(std::string(e.what()).find("CriterionCountViolation"), std::string::npos);
  }
  EXPECT_EQ(port.prompts.size(), 3u);
}

TEST(StubPort, ReplaysPerCaseFilesAndRepeatsTheLast) {
  TempDir dir;
  dir.write("case-g.1.txt", criteria_json(3));
  dir.write("case-g.2.txt", criteria_json(5));
  StubCompletionPort port(dir.path, "o3");
  const auto g = generate_rubric(make_case("case-g"), port, kTemplate, 3);
  EXPECT_EQ(g.request.attempts, 2);
  EXPECT_EQ(port.complete("case-g", "one two three", "").usage.input_tokens, 3);
  EXPECT_EQ(port.complete("case-g", "", "").text, criteria_json(5));
  EXPECT_EQ(code_of([&] { port.complete("case-missing", "", ""); }), ErrorCode::IoFailure);
}

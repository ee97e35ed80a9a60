#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

#include "rubriceval/model.hpp"

namespace rubriceval {

// Slots recognised by assemble_prompt. The first three are required.
inline constexpr std::string_view kTranscriptSlot = "{{transcript}}";
inline constexpr std::string_view kContextSlot = "{{context}}";
inline constexpr std::string_view kNoteSlot = "{{point_in_time_note}}";
inline constexpr std::string_view kSchemaSlot = "{{schema}}";
inline constexpr std::string_view kNoPriorNoteMarker = "[NO PRIOR NOTE AVAILABLE]";
inline constexpr std::string_view kFidelityInstruction = "documentation fidelity";

// JSON description of the structured output requested from the model.
std::string rubric_output_schema();

struct TokenUsage {
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& other) {
    input_tokens += other.input_tokens;
    output_tokens += other.output_tokens;
    return *this;
  }
};

struct GenerationRequest {
  std::string case_id;
  std::string prompt_text;
  std::string model_id;
  TokenUsage token_usage;  // summed over every attempt
  int attempts = 0;
};

struct Completion {
  std::string text;
  TokenUsage usage;
};

// Text-completion port used for rubric generation.
class CompletionPort {
 public:
  virtual ~CompletionPort() = default;
  virtual Completion complete(std::string_view case_id, std::string_view prompt,
                              std::string_view output_schema) = 0;
  virtual std::string model_id() const = 0;
};

// Replays canned responses from <dir>/<case_id>.<attempt>.txt (attempt from
// 1). Past the last file the final response repeats. Token counts are
// whitespace-delimited word counts of prompt and response.
class StubCompletionPort final : public CompletionPort {
 public:
  StubCompletionPort(std::filesystem::path responses_dir, std::string model_id);

  Completion complete(std::string_view case_id, std::string_view prompt,
                      std::string_view output_schema) override;
  std::string model_id() const override { return model_id_; }

 private:
  std::filesystem::path dir_;
  std::string model_id_;
  std::map<std::string, int, std::less<>> calls_;
  std::mutex mu_;
};

// Renders the template by filling every slot in one pass, so slot-like text
// inside case content is left alone. Throws UnfilledSlot when a required slot
// is missing, the template names an unknown slot, or the fidelity
// instruction is absent.
std::string assemble_prompt(const Case& c, std::string_view template_text);

// Accepts a JSON object {"criteria": [...]} or a bare array, optionally in a
// ```json fence or surrounded by prose. The rubric comes back source = llm,
// status = validated (LLM rubrics skip the best/worst gate).
Rubric parse_generated_rubric(std::string_view response_text, std::string_view case_id,
                              std::string_view model_id);

struct GeneratedRubric {
  Rubric rubric;
  GenerationRequest request;
};

// Prompts, parses, and on a structural failure re-prompts with the error
// appended, up to max_attempts. Throws GenerationExhausted with the last error.
GeneratedRubric generate_rubric(const Case& c, CompletionPort& port,
                                std::string_view template_text, int max_attempts);

std::string generated_rubric_id(std::string_view case_id, std::string_view model_id);

}  // namespace rubriceval

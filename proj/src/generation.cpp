#include "rubriceval/generation.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rubriceval/error.hpp"
#include "rubriceval/validate.hpp"

namespace rubriceval {

namespace {

std::int64_t word_count(std::string_view s) {
  std::int64_t n = 0;
  bool in_word = false;
  for (char ch : s) {
    const bool space = ch == ' ' || ch == '\n' || ch == '\t' || ch == '\r';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

void append_list(std::string& out, std::string_view label, const std::vector<std::string>& items) {
  out += label;
  out += ": ";
  if (items.empty()) {
    out += "none recorded";
  } else {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += "; ";
      out += items[i];
    }
  }
  out += '\n';
}

std::string render_transcript(const Case& c) {
  std::string out;
  for (const auto& t : c.transcript) {
    out += t.speaker;
    out += ": ";
    out += t.text;
    out += '\n';
  }
  return out;
}

std::string render_context(const Case& c) {
  std::string out;
  append_list(out, "Conditions", c.context.conditions);
  append_list(out, "Medications", c.context.medications);
  append_list(out, "Allergies", c.context.allergies);
  append_list(out, "Surgical history", c.context.surgical_history);
  append_list(out, "Family history", c.context.family_history);
  return out;
}

std::string_view extract_json(std::string_view text) {
  if (auto fence = text.find("```json"); fence != std::string_view::npos) {
    auto start = text.find('\n', fence);
    auto end = start == std::string_view::npos ? start : text.find("```", start);
    if (start != std::string_view::npos && end != std::string_view::npos) {
      return text.substr(start + 1, end - start - 1);
    }
  }
  const auto obj = text.find_first_of("{[");
  if (obj == std::string_view::npos) return {};
  const char close = text[obj] == '{' ? '}' : ']';
  const auto last = text.find_last_of(close);
  if (last == std::string_view::npos || last < obj) return {};
  return text.substr(obj, last - obj + 1);
}

}  // namespace

std::string rubric_output_schema() {
  static const std::string schema = R"({
  "type": "object",
  "required": ["criteria"],
  "properties": {
    "criteria": {
      "type": "array",
      "minItems": 4,
      "maxItems": 6,
      "items": {
        "type": "object",
        "required": ["text", "weight", "kind"],
        "properties": {
          "text": {"type": "string", "pattern": "^Reward for"},
          "weight": {"type": "integer", "minimum": 1},
          "kind": {"enum": ["completeness", "non_repetition", "other"]},
          "evidence": {"type": "array", "items": {"type": "string"}}
        }
      }
    }
  }
})";
  return schema;
}

std::string assemble_prompt(const Case& c, std::string_view template_text) {
  for (auto slot : {kTranscriptSlot, kContextSlot, kNoteSlot}) {
    if (template_text.find(slot) == std::string_view::npos) {
      throw EvalError(ErrorCode::UnfilledSlot, "template has no " + std::string(slot) + " slot");
    }
  }
  if (template_text.find(kFidelityInstruction) == std::string_view::npos) {
    throw EvalError(ErrorCode::UnfilledSlot, "template lacks the documentation fidelity instruction");
  }

  const std::string transcript = render_transcript(c);
  const std::string context = render_context(c);
  const std::string note = c.point_in_time_note ? *c.point_in_time_note : std::string(kNoPriorNoteMarker);
  const std::string schema = rubric_output_schema();

  std::string out;
  out.reserve(template_text.size() + transcript.size() + context.size() + note.size());
  std::size_t pos = 0;
  while (pos < template_text.size()) {
    const auto open = template_text.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(template_text.substr(pos));
      break;
    }
    out.append(template_text.substr(pos, open - pos));
    const auto close = template_text.find("}}", open);
    if (close == std::string_view::npos) {
      throw EvalError(ErrorCode::UnfilledSlot, "unterminated slot in template");
    }
    const auto slot = template_text.substr(open, close + 2 - open);
    if (slot == kTranscriptSlot) {
      out += transcript;
    } else if (slot == kContextSlot) {
      out += context;
    } else if (slot == kNoteSlot) {
      out += note;
    } else if (slot == kSchemaSlot) {
      out += schema;
    } else {
      throw EvalError(ErrorCode::UnfilledSlot, "unknown slot " + std::string(slot));
    }
    pos = close + 2;
  }
  return out;
}

std::string generated_rubric_id(std::string_view case_id, std::string_view model_id) {
  return std::string(case_id) + "-llm-" + std::string(model_id);
}

Rubric parse_generated_rubric(std::string_view response_text, std::string_view case_id,
                              std::string_view model_id) {
  const auto body = extract_json(response_text);
  if (body.empty()) throw EvalError(ErrorCode::UnparseableResponse, "no JSON found in response");
  auto parsed = nlohmann::json::parse(body, nullptr, false);
  if (parsed.is_discarded()) throw EvalError(ErrorCode::UnparseableResponse, "response JSON does not parse");

  nlohmann::json criteria;
  if (parsed.is_array()) {
    criteria = parsed;
  } else if (parsed.is_object() && parsed.contains("criteria") && parsed["criteria"].is_array()) {
    criteria = parsed["criteria"];
  } else {
    throw EvalError(ErrorCode::UnparseableResponse, "response has no criteria list");
  }

  nlohmann::json raw = {
      {"rubric_id", generated_rubric_id(case_id, model_id)},
      {"case_id", std::string(case_id)},
      {"source", "llm"},
      {"author_id", std::string(model_id)},
      {"criteria", criteria},
      {"status", "validated"},
  };
  return validate_rubric_structure(raw);
}

GeneratedRubric generate_rubric(const Case& c, CompletionPort& port, std::string_view template_text,
                                int max_attempts) {
  GeneratedRubric out;
  out.request.case_id = c.case_id;
  out.request.model_id = port.model_id();
  out.request.prompt_text = assemble_prompt(c, template_text);
  const auto schema = rubric_output_schema();

  std::string last_error = "no attempts made";
  std::string prompt = out.request.prompt_text;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    auto completion = port.complete(c.case_id, prompt, schema);
    out.request.token_usage += completion.usage;
    out.request.attempts = attempt;
    try {
      out.rubric = parse_generated_rubric(completion.text, c.case_id, port.model_id());
      return out;
    } catch (const EvalError& e) {
      last_error = e.what();
    }
    prompt = out.request.prompt_text +
             "\n\nYour previous response was rejected by the rubric validator: " + last_error +
             "\nReturn a corrected rubric that satisfies the schema.\n";
  }
  throw EvalError(ErrorCode::GenerationExhausted,
                  "case " + c.case_id + " after " + std::to_string(max_attempts) +
                      " attempts: " + last_error);
}

StubCompletionPort::StubCompletionPort(std::filesystem::path responses_dir, std::string model_id)
    : dir_(std::move(responses_dir)), model_id_(std::move(model_id)) {}

Completion StubCompletionPort::complete(std::string_view case_id, std::string_view prompt,
                                        std::string_view /*output_schema*/) {
  int attempt = 0;
  {
    std::lock_guard lock(mu_);
    attempt = ++calls_[std::string(case_id)];
  }
  std::filesystem::path file;
  for (int a = attempt; a >= 1; --a) {
    auto candidate = dir_ / (std::string(case_id) + "." + std::to_string(a) + ".txt");
    if (std::filesystem::exists(candidate)) {
      file = candidate;
      break;
    }
  }
  if (file.empty()) {
    throw EvalError(ErrorCode::IoFailure, "no canned response for case " + std::string(case_id) +
                                              " in " + dir_.string());
  }
  std::ifstream in(file, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  Completion c;
  c.text = ss.str();
  c.usage = {word_count(prompt), word_count(c.text)};
  return c;
}

}  // namespace rubriceval

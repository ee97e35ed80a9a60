#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rubriceval/model.hpp"

namespace rubriceval {

namespace fs = std::filesystem;

enum class ScorerMode { Reference, Remote };
enum class CompletionMode { Stub, Remote };

struct ScorerConfig {
  ScorerMode mode = ScorerMode::Reference;
  std::string endpoint;
  // Name of the environment variable holding the bearer token; never the token.
  std::string credentials_env;
  std::string scorer_id = "remote";
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds timeout{30000};
};

struct GenerationConfig {
  CompletionMode mode = CompletionMode::Stub;
  fs::path responses_dir;
  std::string endpoint;
  std::string credentials_env;
  std::string model_id = "o3";
  fs::path template_path;
  int max_attempts = 3;
};

struct TokenSpendOverride {
  std::string model_id;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  std::int64_t rubric_count = 0;
};

struct CostConfig {
  fs::path effort_path;
  fs::path prices_path;
  double hourly_rate = 100.0;
  std::optional<std::int64_t> accepted_rubrics;
  std::optional<TokenSpendOverride> token_spend;
};

struct DatasetManifest {
  fs::path manifest_path;
  fs::path cases_path;
  fs::path rubrics_path;  // directory, one JSON document per rubric
  fs::path notes_path;
  std::vector<std::string> experiments;
  ScorerConfig scorer;
  std::optional<GenerationConfig> generation;
  std::optional<CostConfig> cost;
  fs::path output_dir;
  int validation_runs = 3;
  int experiment_runs = 2;
};

// Relative paths resolve against the manifest's directory. Throws
// InvalidManifest for missing files, duplicate experiments, or bad fields.
DatasetManifest load_manifest(const fs::path& path);
DatasetManifest parse_manifest(const nlohmann::json& raw, const fs::path& base_dir);

struct Dataset {
  std::vector<Case> cases;
  std::vector<Rubric> rubrics;  // sorted by rubric_id
  std::vector<NoteOutput> notes;

  const Case* find_case(const std::string& case_id) const;
  const NoteOutput* find_note(const std::string& note_id) const;
  Rubric* find_rubric(const std::string& rubric_id);

  std::map<std::string, std::size_t> case_index;
  std::map<std::string, std::size_t> note_index;
  std::map<std::string, std::size_t> rubric_index;
};

// Streams the line-delimited case and note files and every *.json rubric
// document; validates each record and all cross-references. Errors carry the
// file and 1-based line: ParseError for malformed JSON, DuplicateId,
// DanglingReference, or the record validator's own code.
Dataset load_dataset(const DatasetManifest& manifest);

// Calls fn(record, line_number) for each non-blank line. Throws ParseError.
void read_jsonl(const fs::path& path,
                const std::function<void(const nlohmann::json&, std::size_t)>& fn);

void write_text(const fs::path& path, const std::string& content);
void append_text(const fs::path& path, const std::string& content);
std::string read_text(const fs::path& path);

}  // namespace rubriceval

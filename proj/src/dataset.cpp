#include "rubriceval/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json_fields.hpp"
#include "rubriceval/codec.hpp"
#include "rubriceval/error.hpp"
#include "rubriceval/validate.hpp"

namespace rubriceval {

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string where(const fs::path& file, std::size_t line) {
  return file.string() + ":" + std::to_string(line);
}

fs::path require_path(const nlohmann::json& raw, const char* key, const fs::path& base) {
  try {
    return resolve(base, detail::require_string(raw, key));
  } catch (const EvalError& e) {
    throw EvalError(ErrorCode::InvalidManifest, e.what());
  }
}

void require_exists(const fs::path& p, const char* what) {
  if (!fs::exists(p)) {
    throw EvalError(ErrorCode::InvalidManifest, std::string(what) + " not found: " + p.string());
  }
}

}  // namespace

DatasetManifest parse_manifest(const nlohmann::json& raw, const fs::path& base_dir) {
  if (!raw.is_object()) throw EvalError(ErrorCode::InvalidManifest, "manifest must be a JSON object");
  DatasetManifest m;
  m.cases_path = require_path(raw, "cases_path", base_dir);
  m.rubrics_path = require_path(raw, "rubrics_path", base_dir);
  m.notes_path = require_path(raw, "notes_path", base_dir);
  require_exists(m.cases_path, "cases_path");
  require_exists(m.rubrics_path, "rubrics_path");
  require_exists(m.notes_path, "notes_path");
  m.output_dir = raw.contains("output_dir") ? require_path(raw, "output_dir", base_dir)
                                            : base_dir / "out";

  try {
    m.experiments = detail::string_list(raw, "experiments", true);
  } catch (const EvalError& e) {
    throw EvalError(ErrorCode::InvalidManifest, e.what());
  }
  std::set<std::string> unique(m.experiments.begin(), m.experiments.end());
  if (unique.size() != m.experiments.size()) {
    throw EvalError(ErrorCode::InvalidManifest, "experiment ids must be unique");
  }

  if (auto it = raw.find("runs"); it != raw.end()) {
    m.validation_runs = it->value("validation", 3);
    m.experiment_runs = it->value("experiment", 2);
  }
  if (m.validation_runs != 3) {
    throw EvalError(ErrorCode::InvalidManifest, "the best/worst gate is defined over exactly 3 runs");
  }
  if (m.experiment_runs < 1) throw EvalError(ErrorCode::InvalidManifest, "experiment runs must be >= 1");

  if (auto it = raw.find("scorer"); it != raw.end()) {
    const auto& s = *it;
    const auto mode = s.value("mode", std::string("reference"));
    if (mode == "reference") {
      m.scorer.mode = ScorerMode::Reference;
    } else if (mode == "remote") {
      m.scorer.mode = ScorerMode::Remote;
      m.scorer.endpoint = s.value("endpoint", std::string());
      if (m.scorer.endpoint.empty()) {
        throw EvalError(ErrorCode::InvalidManifest, "remote scorer needs an endpoint");
      }
      if (s.contains("credentials")) {
        throw EvalError(ErrorCode::InvalidManifest,
                        "inline credentials are not accepted; use credentials_env");
      }
      m.scorer.credentials_env = s.value("credentials_env", std::string());
      m.scorer.scorer_id = s.value("scorer_id", std::string("remote"));
      m.scorer.max_in_flight = s.value("max_in_flight", std::size_t{4});
      m.scorer.timeout = std::chrono::milliseconds(s.value("timeout_ms", 30000));
    } else {
      throw EvalError(ErrorCode::InvalidManifest, "unknown scorer mode '" + mode + "'");
    }
  }

  if (auto it = raw.find("generation"); it != raw.end() && !it->is_null()) {
    const auto& g = *it;
    GenerationConfig gen;
    const auto mode = g.value("mode", std::string("stub"));
    if (mode == "stub") {
      gen.mode = CompletionMode::Stub;
      gen.responses_dir = require_path(g, "responses_dir", base_dir);
      require_exists(gen.responses_dir, "generation.responses_dir");
    } else if (mode == "remote") {
      gen.mode = CompletionMode::Remote;
      gen.endpoint = g.value("endpoint", std::string());
      gen.credentials_env = g.value("credentials_env", std::string());
      if (gen.endpoint.empty()) throw EvalError(ErrorCode::InvalidManifest, "remote generation needs an endpoint");
    } else {
      throw EvalError(ErrorCode::InvalidManifest, "unknown generation mode '" + mode + "'");
    }
    gen.model_id = g.value("model_id", std::string("o3"));
    gen.template_path = require_path(g, "template_path", base_dir);
    require_exists(gen.template_path, "generation.template_path");
    gen.max_attempts = g.value("max_attempts", 3);
    if (gen.max_attempts < 1) throw EvalError(ErrorCode::InvalidManifest, "max_attempts must be >= 1");
    m.generation = std::move(gen);
  }

  if (auto it = raw.find("cost"); it != raw.end() && !it->is_null()) {
    const auto& c = *it;
    CostConfig cost;
    cost.effort_path = require_path(c, "effort_path", base_dir);
    cost.prices_path = require_path(c, "prices_path", base_dir);
    require_exists(cost.effort_path, "cost.effort_path");
    require_exists(cost.prices_path, "cost.prices_path");
    cost.hourly_rate = c.value("hourly_rate", 100.0);
    if (c.contains("accepted_rubrics")) cost.accepted_rubrics = c["accepted_rubrics"].get<std::int64_t>();
    if (auto ts = c.find("token_spend"); ts != c.end()) {
      cost.token_spend = TokenSpendOverride{ts->value("model_id", std::string("o3")),
                                            ts->value("input_tokens", std::int64_t{0}),
                                            ts->value("output_tokens", std::int64_t{0}),
                                            ts->value("rubric_count", std::int64_t{0})};
    }
    m.cost = std::move(cost);
  }
  return m;
}

DatasetManifest load_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw EvalError(ErrorCode::InvalidManifest, "manifest not found: " + path.string());
  auto raw = nlohmann::json::parse(read_text(path), nullptr, false);
  if (raw.is_discarded()) throw EvalError(ErrorCode::InvalidManifest, "manifest is not valid JSON: " + path.string());
  auto m = parse_manifest(raw, fs::absolute(path).parent_path());
  m.manifest_path = path;
  return m;
}

void read_jsonl(const fs::path& path,
                const std::function<void(const nlohmann::json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw EvalError(ErrorCode::IoFailure, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw EvalError(ErrorCode::ParseError, where(path, line_no) + ": line " +
                                                 std::to_string(line_no) + " is not valid JSON");
    }
    try {
      fn(j, line_no);
    } catch (const EvalError& e) {
      if (std::string_view(e.what()).find(path.string()) != std::string_view::npos) throw;
      throw EvalError(e.code(), where(path, line_no) + ": " + e.what());
    }
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EvalError(ErrorCode::IoFailure, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw EvalError(ErrorCode::IoFailure, "cannot write " + path.string());
  out << content;
  if (!out) throw EvalError(ErrorCode::IoFailure, "write failed: " + path.string());
}

void append_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw EvalError(ErrorCode::IoFailure, "cannot append to " + path.string());
  out << content;
  if (!out) throw EvalError(ErrorCode::IoFailure, "append failed: " + path.string());
}

const Case* Dataset::find_case(const std::string& case_id) const {
  auto it = case_index.find(case_id);
  return it == case_index.end() ? nullptr : &cases[it->second];
}

const NoteOutput* Dataset::find_note(const std::string& note_id) const {
  auto it = note_index.find(note_id);
  return it == note_index.end() ? nullptr : &notes[it->second];
}

Rubric* Dataset::find_rubric(const std::string& rubric_id) {
  auto it = rubric_index.find(rubric_id);
  return it == rubric_index.end() ? nullptr : &rubrics[it->second];
}

Dataset load_dataset(const DatasetManifest& manifest) {
  Dataset ds;
  read_jsonl(manifest.cases_path, [&](const nlohmann::json& j, std::size_t) {
    auto c = validate_case(j);
    if (ds.case_index.contains(c.case_id)) {
      throw EvalError(ErrorCode::DuplicateCaseId, "case_id " + c.case_id + " appears twice");
    }
    ds.case_index.emplace(c.case_id, ds.cases.size());
    ds.cases.push_back(std::move(c));
  });

  const std::set<std::string> experiments(manifest.experiments.begin(), manifest.experiments.end());
  read_jsonl(manifest.notes_path, [&](const nlohmann::json& j, std::size_t) {
    auto n = note_from_json(j);
    if (ds.note_index.contains(n.note_id)) {
      throw EvalError(ErrorCode::DuplicateId, "note_id " + n.note_id + " appears twice");
    }
    if (!ds.case_index.contains(n.case_id)) {
      throw EvalError(ErrorCode::DanglingReference, "note " + n.note_id + " references unknown case " + n.case_id);
    }
    if (!experiments.empty() && !experiments.contains(n.experiment_id)) {
      throw EvalError(ErrorCode::DanglingReference,
                      "note " + n.note_id + " references experiment " + n.experiment_id +
                          " missing from the manifest");
    }
    ds.note_index.emplace(n.note_id, ds.notes.size());
    ds.notes.push_back(std::move(n));
  });
  check_label_invariants(ds.notes);

  std::vector<fs::path> files;
  if (fs::is_directory(manifest.rubrics_path)) {
    for (const auto& entry : fs::directory_iterator(manifest.rubrics_path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
  } else {
    files.push_back(manifest.rubrics_path);
  }
  std::ranges::sort(files);
  for (const auto& f : files) {
    auto raw = nlohmann::json::parse(read_text(f), nullptr, false);
    if (raw.is_discarded()) throw EvalError(ErrorCode::ParseError, f.string() + ": not valid JSON");
    Rubric r;
    try {
      r = validate_rubric_structure(raw);
    } catch (const EvalError& e) {
      throw EvalError(e.code(), f.string() + ": " + e.what());
    }
    if (!ds.case_index.contains(r.case_id)) {
      throw EvalError(ErrorCode::DanglingReference,
                      f.string() + ": rubric " + r.rubric_id + " references unknown case " + r.case_id);
    }
    ds.rubrics.push_back(std::move(r));
  }
  std::ranges::sort(ds.rubrics, {}, &Rubric::rubric_id);
  for (std::size_t i = 0; i < ds.rubrics.size(); ++i) {
    if (!ds.rubric_index.emplace(ds.rubrics[i].rubric_id, i).second) {
      throw EvalError(ErrorCode::DuplicateId, "rubric_id " + ds.rubrics[i].rubric_id + " appears twice");
    }
  }
  return ds;
}

}  // namespace rubriceval

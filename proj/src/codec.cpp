#include "rubriceval/codec.hpp"

#include <cmath>

#include <fmt/format.h>

#include "json_fields.hpp"
#include "rubriceval/error.hpp"

namespace rubriceval {

using detail::optional_string;
using detail::require;
using detail::require_integer;
using detail::require_number;
using detail::require_string;

ordered_json to_json(const Case& c) {
  ordered_json turns = ordered_json::array();
  for (const auto& t : c.transcript) turns.push_back({{"speaker", t.speaker}, {"text", t.text}});
  ordered_json j;
  j["case_id"] = c.case_id;
  j["transcript"] = std::move(turns);
  if (c.point_in_time_note) j["point_in_time_note"] = *c.point_in_time_note;
  j["context"] = {
      {"conditions", c.context.conditions},
      {"medications", c.context.medications},
      {"allergies", c.context.allergies},
      {"surgical_history", c.context.surgical_history},
      {"family_history", c.context.family_history},
  };
  j["tags"] = {
      {"specialty", c.tags.specialty},
      {"encounter_type", c.tags.encounter_type},
      {"length", to_string(c.tags.length)},
      {"problem_count", to_string(c.tags.problem_count)},
      {"acuity", to_string(c.tags.acuity)},
  };
  j["provenance"] = to_string(c.provenance);
  return j;
}

ordered_json to_json(const Criterion& c) {
  ordered_json j;
  j["text"] = c.text;
  j["weight"] = c.weight;
  j["kind"] = to_string(c.kind);
  if (!c.evidence.empty()) j["evidence"] = c.evidence;
  return j;
}

ordered_json to_json(const Rubric& r) {
  ordered_json criteria = ordered_json::array();
  for (const auto& c : r.criteria) criteria.push_back(to_json(c));
  ordered_json j;
  j["rubric_id"] = r.rubric_id;
  j["case_id"] = r.case_id;
  j["source"] = to_string(r.source);
  j["author_id"] = r.author_id;
  j["criteria"] = std::move(criteria);
  j["status"] = to_string(r.status);
  return j;
}

ordered_json to_json(const NoteOutput& n) {
  ordered_json labels = ordered_json::array();
  for (const auto& l : n.labels) {
    labels.push_back({{"label", to_string(l.label)}, {"labeler_id", l.labeler_id}});
  }
  ordered_json j;
  j["note_id"] = n.note_id;
  j["case_id"] = n.case_id;
  j["experiment_id"] = n.experiment_id;
  j["vendor"] = to_string(n.vendor);
  j["generator_config"] = n.generator_config;
  j["content"] = n.content;
  j["labels"] = std::move(labels);
  return j;
}

ordered_json to_json(const ScoreRecord& s) {
  ordered_json j;
  j["note_id"] = s.note_id;
  j["rubric_id"] = s.rubric_id;
  j["run_index"] = s.run_index;
  j["satisfactions"] = s.satisfactions;
  j["normalized_score"] = s.normalized_score;
  j["scorer_id"] = s.scorer_id;
  j["created_at"] = s.created_at;
  return j;
}

NoteOutput note_from_json(const nlohmann::json& raw) {
  NoteOutput n;
  n.note_id = require_string(raw, "note_id");
  n.case_id = require_string(raw, "case_id");
  n.experiment_id = require_string(raw, "experiment_id");
  n.vendor = parse_vendor(require_string(raw, "vendor"));
  n.generator_config = optional_string(raw, "generator_config");
  n.content = require_string(raw, "content");
  if (auto it = raw.find("labels"); it != raw.end() && !it->is_null()) {
    if (!it->is_array()) throw EvalError(ErrorCode::MalformedRecord, "labels must be a list");
    for (const auto& l : *it) {
      n.labels.push_back({parse_label_kind(require_string(l, "label")),
                          require_string(l, "labeler_id")});
    }
  }
  return n;
}

ScoreRecord score_from_json(const nlohmann::json& raw) {
  ScoreRecord s;
  s.note_id = require_string(raw, "note_id");
  s.rubric_id = require_string(raw, "rubric_id");
  s.run_index = require_integer(raw, "run_index");
  if (s.run_index < 0) throw EvalError(ErrorCode::MalformedRecord, "negative run_index");
  const auto& sats = require(raw, "satisfactions");
  if (!sats.is_array()) throw EvalError(ErrorCode::MalformedRecord, "satisfactions must be a list");
  for (const auto& v : sats) {
    if (!v.is_number()) throw EvalError(ErrorCode::MalformedRecord, "satisfaction must be a number");
    s.satisfactions.push_back(v.get<double>());
  }
  s.normalized_score = require_number(raw, "normalized_score");
  s.scorer_id = require_string(raw, "scorer_id");
  s.created_at = optional_string(raw, "created_at");
  return s;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

}  // namespace rubriceval

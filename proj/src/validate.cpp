#include "rubriceval/validate.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <utility>

#include "json_fields.hpp"
#include "rubriceval/error.hpp"

namespace rubriceval {

using detail::optional_string;
using detail::require;
using detail::require_integer;
using detail::require_string;
using detail::string_list;

Case validate_case(const nlohmann::json& raw) {
  Case c;
  c.case_id = require_string(raw, "case_id");
  if (c.case_id.empty()) throw EvalError(ErrorCode::MalformedRecord, "empty case_id");

  const auto& turns = require(raw, "transcript");
  if (!turns.is_array()) throw EvalError(ErrorCode::MalformedRecord, "transcript must be a list");
  if (turns.empty()) throw EvalError(ErrorCode::EmptyTranscript, "case " + c.case_id);
  for (const auto& t : turns) {
    Turn turn{require_string(t, "speaker"), require_string(t, "text")};
    if (turn.speaker.empty() || turn.text.empty()) {
      throw EvalError(ErrorCode::EmptyTranscript,
                      "case " + c.case_id + " has a turn with empty speaker or text");
    }
    c.transcript.push_back(std::move(turn));
  }

  if (auto it = raw.find("point_in_time_note"); it != raw.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw EvalError(ErrorCode::MalformedRecord, "point_in_time_note must be a string");
    }
    c.point_in_time_note = it->get<std::string>();
  }

  if (auto it = raw.find("context"); it != raw.end() && !it->is_null()) {
    const auto& ctx = *it;
    c.context.conditions = string_list(ctx, "conditions", false);
    c.context.medications = string_list(ctx, "medications", false);
    c.context.allergies = string_list(ctx, "allergies", false);
    c.context.surgical_history = string_list(ctx, "surgical_history", false);
    c.context.family_history = string_list(ctx, "family_history", false);
  }

  const auto& tags = require(raw, "tags");
  c.tags.specialty = require_string(tags, "specialty");
  c.tags.encounter_type = require_string(tags, "encounter_type");
  c.tags.length = parse_encounter_length(require_string(tags, "length"));
  c.tags.problem_count = parse_problem_count(require_string(tags, "problem_count"));
  c.tags.acuity = parse_acuity(require_string(tags, "acuity"));
  c.provenance = parse_provenance(require_string(raw, "provenance"));
  return c;
}

const Rubric& validate_rubric_structure(const Rubric& rubric) {
  const auto n = rubric.criteria.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = rubric.criteria[i];
    if (!c.text.starts_with(kCriterionPrefix)) {
      throw EvalError(ErrorCode::BadCriterionPrefix,
                      "rubric " + rubric.rubric_id + " criterion " + std::to_string(i) +
                          " does not start with \"Reward for\"");
    }
    if (c.weight < 1) {
      throw EvalError(ErrorCode::WeightOutOfRange,
                      "rubric " + rubric.rubric_id + " criterion " + std::to_string(i) +
                          " has weight " + std::to_string(c.weight));
    }
  }

  const bool llm = rubric.source == RubricSource::Llm;
  const auto lo = llm ? kLlmMinCriteria : kClinicianMinCriteria;
  const auto hi = llm ? kLlmMaxCriteria : kClinicianMaxCriteria;
  if (n < lo || n > hi) {
    throw EvalError(ErrorCode::CriterionCountViolation,
                    "rubric " + rubric.rubric_id + " (source " +
                        std::string(to_string(rubric.source)) + ") has " + std::to_string(n) +
                        " criteria, allowed " + std::to_string(lo) + ".." + std::to_string(hi));
  }

  for (CriterionKind kind : {CriterionKind::Completeness, CriterionKind::NonRepetition}) {
    std::size_t count = 0;
    for (const auto& c : rubric.criteria) count += c.kind == kind ? 1 : 0;
    if (count == 0) {
      throw EvalError(ErrorCode::MissingMandatedCriterion,
                      "rubric " + rubric.rubric_id + " lacks a " +
                          std::string(to_string(kind)) + " criterion");
    }
    if (count > 1) {
      throw EvalError(ErrorCode::DuplicateMandatedCriterion,
                      "rubric " + rubric.rubric_id + " has " + std::to_string(count) + " " +
                          std::string(to_string(kind)) + " criteria");
    }
  }
  return rubric;
}

Rubric validate_rubric_structure(const nlohmann::json& raw) {
  Rubric r;
  r.rubric_id = require_string(raw, "rubric_id");
  r.case_id = require_string(raw, "case_id");
  r.source = parse_rubric_source(require_string(raw, "source"));
  r.author_id = require_string(raw, "author_id");
  r.status = parse_rubric_status(optional_string(raw, "status", "draft"));

  const auto& criteria = require(raw, "criteria");
  if (!criteria.is_array()) throw EvalError(ErrorCode::MalformedRecord, "criteria must be a list");
  for (const auto& entry : criteria) {
    Criterion c;
    c.text = require_string(entry, "text");
    c.weight = require_integer(entry, "weight");
    c.kind = parse_criterion_kind(require_string(entry, "kind"));
    c.evidence = string_list(entry, "evidence", false);
    r.criteria.push_back(std::move(c));
  }
  validate_rubric_structure(static_cast<const Rubric&>(r));
  return r;
}

void check_label_invariants(std::span<const NoteOutput> notes) {
  // (case_id, labeler_id, kind) -> note_id
  std::map<std::tuple<std::string, std::string, LabelKind>, std::string> seen;
  for (const auto& n : notes) {
    for (const auto& l : n.labels) {
      auto key = std::make_tuple(n.case_id, l.labeler_id, l.label);
      auto [it, inserted] = seen.emplace(key, n.note_id);
      if (!inserted && it->second != n.note_id) {
        throw EvalError(ErrorCode::LabelConflict,
                        "labeler " + l.labeler_id + " marked two " +
                            std::string(to_string(l.label)) + " notes in case " + n.case_id);
      }
    }
    if (std::ranges::any_of(n.labels, [&](const NoteLabel& l) {
          return l.label == LabelKind::Best && n.has_label(LabelKind::Worst, l.labeler_id);
        })) {
      throw EvalError(ErrorCode::LabelConflict,
                      "note " + n.note_id + " is labeled both best and worst by one labeler");
    }
  }
}

}  // namespace rubriceval

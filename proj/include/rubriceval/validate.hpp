#pragma once

#include <span>

#include <json.hpp>

#include "rubriceval/model.hpp"

namespace rubriceval {

// Decodes and checks one case record. Throws EvalError with EmptyTranscript,
// InvalidTag, or MalformedRecord. Duplicate ids are a dataset-level check.
Case validate_case(const nlohmann::json& raw);

// Decodes a rubric document and enforces the source-specific structure:
// "Reward for" prefixes, weights >= 1, criterion counts (clinician 1..15,
// llm 4..6), and exactly one completeness and one non_repetition criterion.
Rubric validate_rubric_structure(const nlohmann::json& raw);

// Same checks on an already-decoded rubric; returns it unchanged on success.
const Rubric& validate_rubric_structure(const Rubric& rubric);

// Within each (case_id, labeler_id) at most one best and one worst label, on
// distinct notes. Throws LabelConflict.
void check_label_invariants(std::span<const NoteOutput> notes);

}  // namespace rubriceval

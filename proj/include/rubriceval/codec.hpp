#pragma once

// Record-level JSON encoding for everything persisted to disk. Field names
// follow the on-disk formats documented in the README.

#include <json.hpp>

#include "rubriceval/model.hpp"

namespace rubriceval {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const Case& c);
ordered_json to_json(const Criterion& c);
ordered_json to_json(const Rubric& r);
ordered_json to_json(const NoteOutput& n);
ordered_json to_json(const ScoreRecord& s);

NoteOutput note_from_json(const nlohmann::json& raw);
ScoreRecord score_from_json(const nlohmann::json& raw);

// Shortest round-trip text for a double; used by every CSV and JSON writer so
// artifacts are reproducible byte for byte.
std::string format_real(double v);

}  // namespace rubriceval

#pragma once

// Shared domain types. Everything here is a plain value type; once built by
// the validators in validate.hpp the objects are treated as immutable and can
// be shared across worker threads.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rubriceval {

struct Turn {
  std::string speaker;
  std::string text;

  bool operator==(const Turn&) const = default;
};

struct LongitudinalContext {
  std::vector<std::string> conditions;
  std::vector<std::string> medications;
  std::vector<std::string> allergies;
  std::vector<std::string> surgical_history;
  std::vector<std::string> family_history;

  bool operator==(const LongitudinalContext&) const = default;
};

enum class EncounterLength { Short, Medium, Long };
enum class ProblemCount { Single, Multi };
enum class Acuity { Low, Moderate, High };
enum class Provenance { Real, Synthetic };

struct CaseTags {
  std::string specialty;
  std::string encounter_type;
  EncounterLength length = EncounterLength::Short;
  ProblemCount problem_count = ProblemCount::Single;
  Acuity acuity = Acuity::Low;

  bool operator==(const CaseTags&) const = default;
};

// A case bundles the transcript, the chart state at segment start (absent in
// some cases), and the patient's longitudinal record.
struct Case {
  std::string case_id;
  std::vector<Turn> transcript;
  std::optional<std::string> point_in_time_note;
  LongitudinalContext context;
  CaseTags tags;
  Provenance provenance = Provenance::Real;

  bool operator==(const Case&) const = default;
};

enum class CriterionKind { Completeness, NonRepetition, Other };

inline constexpr std::string_view kCriterionPrefix = "Reward for";

struct Criterion {
  std::string text;
  std::int64_t weight = 1;
  CriterionKind kind = CriterionKind::Other;
  // Phrases the offline reference scorer looks for; optional in rubric files.
  std::vector<std::string> evidence;

  bool operator==(const Criterion&) const = default;
};

enum class RubricSource { Clinician, Llm };
enum class RubricStatus { Draft, Validated, Rejected };

inline constexpr std::size_t kClinicianMinCriteria = 1;
inline constexpr std::size_t kClinicianMaxCriteria = 15;
inline constexpr std::size_t kLlmMinCriteria = 4;
inline constexpr std::size_t kLlmMaxCriteria = 6;

struct Rubric {
  std::string rubric_id;
  std::string case_id;
  RubricSource source = RubricSource::Clinician;
  std::string author_id;
  std::vector<Criterion> criteria;
  RubricStatus status = RubricStatus::Draft;

  std::vector<std::int64_t> weights() const;
  std::int64_t total_weight() const;

  bool operator==(const Rubric&) const = default;
};

enum class Vendor { OpenAi, Anthropic, Other };
enum class LabelKind { Best, Worst };

struct NoteLabel {
  LabelKind label = LabelKind::Best;
  std::string labeler_id;

  bool operator==(const NoteLabel&) const = default;
};

struct NoteOutput {
  std::string note_id;
  std::string case_id;
  std::string experiment_id;
  Vendor vendor = Vendor::Other;
  std::string generator_config;
  std::string content;
  // One entry per clinician who picked this note as best or worst.
  std::vector<NoteLabel> labels;

  bool has_label(LabelKind kind, std::string_view labeler_id) const;

  bool operator==(const NoteOutput&) const = default;
};

struct ScoreRecord {
  std::string note_id;
  std::string rubric_id;
  std::int64_t run_index = 0;
  std::vector<double> satisfactions;
  double normalized_score = 0.0;
  std::string scorer_id;
  std::string created_at;

  bool operator==(const ScoreRecord&) const = default;
};

std::string_view to_string(EncounterLength v);
std::string_view to_string(ProblemCount v);
std::string_view to_string(Acuity v);
std::string_view to_string(Provenance v);
std::string_view to_string(CriterionKind v);
std::string_view to_string(RubricSource v);
std::string_view to_string(RubricStatus v);
std::string_view to_string(Vendor v);
std::string_view to_string(LabelKind v);

// Parsers throw EvalError(InvalidTag) on unknown spellings.
EncounterLength parse_encounter_length(std::string_view s);
ProblemCount parse_problem_count(std::string_view s);
Acuity parse_acuity(std::string_view s);
Provenance parse_provenance(std::string_view s);
CriterionKind parse_criterion_kind(std::string_view s);
RubricSource parse_rubric_source(std::string_view s);
RubricStatus parse_rubric_status(std::string_view s);
Vendor parse_vendor(std::string_view s);
LabelKind parse_label_kind(std::string_view s);

}  // namespace rubriceval

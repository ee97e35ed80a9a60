#include "rubriceval/model.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <utility>

#include "rubriceval/error.hpp"

namespace rubriceval {

namespace {

template <typename E, std::size_t N>
E lookup(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table,
         std::string_view what, ErrorCode code = ErrorCode::InvalidTag) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw EvalError(code, "unknown " + std::string(what) + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view name_of(E v, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, value] : table) {
    if (value == v) return name;
  }
  return "?";
}

constexpr std::array<std::pair<std::string_view, EncounterLength>, 3> kLengths{{
    {"short", EncounterLength::Short},
    {"medium", EncounterLength::Medium},
    {"long", EncounterLength::Long},
}};
constexpr std::array<std::pair<std::string_view, ProblemCount>, 2> kProblems{{
    {"single", ProblemCount::Single},
    {"multi", ProblemCount::Multi},
}};
constexpr std::array<std::pair<std::string_view, Acuity>, 3> kAcuity{{
    {"low", Acuity::Low},
    {"moderate", Acuity::Moderate},
    {"high", Acuity::High},
}};
constexpr std::array<std::pair<std::string_view, Provenance>, 2> kProvenance{{
    {"real", Provenance::Real},
    {"synthetic", Provenance::Synthetic},
}};
constexpr std::array<std::pair<std::string_view, CriterionKind>, 3> kKinds{{
    {"completeness", CriterionKind::Completeness},
    {"non_repetition", CriterionKind::NonRepetition},
    {"other", CriterionKind::Other},
}};
constexpr std::array<std::pair<std::string_view, RubricSource>, 2> kSources{{
    {"clinician", RubricSource::Clinician},
    {"llm", RubricSource::Llm},
}};
constexpr std::array<std::pair<std::string_view, RubricStatus>, 3> kStatuses{{
    {"draft", RubricStatus::Draft},
    {"validated", RubricStatus::Validated},
    {"rejected", RubricStatus::Rejected},
}};
constexpr std::array<std::pair<std::string_view, Vendor>, 3> kVendors{{
    {"openai", Vendor::OpenAi},
    {"anthropic", Vendor::Anthropic},
    {"other", Vendor::Other},
}};
constexpr std::array<std::pair<std::string_view, LabelKind>, 2> kLabels{{
    {"best", LabelKind::Best},
    {"worst", LabelKind::Worst},
}};

}  // namespace

std::vector<std::int64_t> Rubric::weights() const {
  std::vector<std::int64_t> out;
  out.reserve(criteria.size());
  for (const auto& c : criteria) out.push_back(c.weight);
  return out;
}

std::int64_t Rubric::total_weight() const {
  return std::accumulate(criteria.begin(), criteria.end(), std::int64_t{0},
                         [](std::int64_t acc, const Criterion& c) { return acc + c.weight; });
}

bool NoteOutput::has_label(LabelKind kind, std::string_view labeler_id) const {
  return std::ranges::any_of(labels, [&](const NoteLabel& l) {
    return l.label == kind && l.labeler_id == labeler_id;
  });
}

std::string_view to_string(EncounterLength v) { return name_of(v, kLengths); }
std::string_view to_string(ProblemCount v) { return name_of(v, kProblems); }
std::string_view to_string(Acuity v) { return name_of(v, kAcuity); }
std::string_view to_string(Provenance v) { return name_of(v, kProvenance); }
std::string_view to_string(CriterionKind v) { return name_of(v, kKinds); }
std::string_view to_string(RubricSource v) { return name_of(v, kSources); }
std::string_view to_string(RubricStatus v) { return name_of(v, kStatuses); }
std::string_view to_string(Vendor v) { return name_of(v, kVendors); }
std::string_view to_string(LabelKind v) { return name_of(v, kLabels); }

EncounterLength parse_encounter_length(std::string_view s) { return lookup(s, kLengths, "length"); }
ProblemCount parse_problem_count(std::string_view s) { return lookup(s, kProblems, "problem_count"); }
Acuity parse_acuity(std::string_view s) { return lookup(s, kAcuity, "acuity"); }
Provenance parse_provenance(std::string_view s) { return lookup(s, kProvenance, "provenance"); }
CriterionKind parse_criterion_kind(std::string_view s) { return lookup(s, kKinds, "criterion kind"); }
RubricSource parse_rubric_source(std::string_view s) { return lookup(s, kSources, "rubric source"); }
RubricStatus parse_rubric_status(std::string_view s) { return lookup(s, kStatuses, "rubric status"); }
Vendor parse_vendor(std::string_view s) {
  return lookup(s, kVendors, "vendor", ErrorCode::UnknownVendor);
}
LabelKind parse_label_kind(std::string_view s) { return lookup(s, kLabels, "label"); }

}  // namespace rubriceval

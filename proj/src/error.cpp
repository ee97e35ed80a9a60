#include "rubriceval/error.hpp"

namespace rubriceval {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyTranscript: return "EmptyTranscript";
    case ErrorCode::DuplicateCaseId: return "DuplicateCaseId";
    case ErrorCode::InvalidTag: return "InvalidTag";
    case ErrorCode::BadCriterionPrefix: return "BadCriterionPrefix";
    case ErrorCode::WeightOutOfRange: return "WeightOutOfRange";
    case ErrorCode::CriterionCountViolation: return "CriterionCountViolation";
    case ErrorCode::MissingMandatedCriterion: return "MissingMandatedCriterion";
    case ErrorCode::DuplicateMandatedCriterion: return "DuplicateMandatedCriterion";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyCriteria: return "EmptyCriteria";
    case ErrorCode::EmptyEvidence: return "EmptyEvidence";
    case ErrorCode::SatisfactionOutOfRange: return "SatisfactionOutOfRange";
    case ErrorCode::AgentTransportFailure: return "AgentTransportFailure";
    case ErrorCode::TooFewRuns: return "TooFewRuns";
    case ErrorCode::MixedKeys: return "MixedKeys";
    case ErrorCode::KeyMismatch: return "KeyMismatch";
    case ErrorCode::WrongRunCount: return "WrongRunCount";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::LabelConflict: return "LabelConflict";
    case ErrorCode::UnfilledSlot: return "UnfilledSlot";
    case ErrorCode::UnparseableResponse: return "UnparseableResponse";
    case ErrorCode::GenerationExhausted: return "GenerationExhausted";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ItemSetMismatch: return "ItemSetMismatch";
    case ErrorCode::UnknownVendor: return "UnknownVendor";
    case ErrorCode::ZeroRubrics: return "ZeroRubrics";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::InvalidPrice: return "InvalidPrice";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
  }
  return "Unknown";
}

}  // namespace rubriceval

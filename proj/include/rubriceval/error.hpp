#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rubriceval {

enum class ErrorCode {
  // core-model
  EmptyTranscript,
  DuplicateCaseId,
  InvalidTag,
  BadCriterionPrefix,
  WeightOutOfRange,
  CriterionCountViolation,
  MissingMandatedCriterion,
  DuplicateMandatedCriterion,
  MalformedRecord,
  // scoring-engine
  LengthMismatch,
  EmptyCriteria,
  EmptyEvidence,
  SatisfactionOutOfRange,
  AgentTransportFailure,
  TooFewRuns,
  MixedKeys,
  KeyMismatch,
  // validation-gate
  WrongRunCount,
  MissingLabel,
  LabelConflict,
  // rubric-generation
  UnfilledSlot,
  UnparseableResponse,
  GenerationExhausted,
  // analytics / aggregation
  EmptyInput,
  ItemSetMismatch,
  UnknownVendor,
  // cost-ledger
  ZeroRubrics,
  DivisionByZero,
  InvalidPrice,
  // io
  ParseError,
  DanglingReference,
  DuplicateId,
  IoFailure,
  InvalidManifest,
};

std::string_view to_string(ErrorCode code);

// Single exception type; callers branch on code().
class EvalError : public std::runtime_error {
 public:
  EvalError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rubriceval

#include "vmrank/error.hpp"

namespace vmrank {

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::Parse: return "parse";
    case Stage::Fixture: return "fixture";
    case Stage::Aggregate: return "aggregate";
    case Stage::Normalize: return "normalize";
    case Stage::Score: return "score";
    case Stage::Rank: return "rank";
    case Stage::Sweep: return "sweep";
    case Stage::Validate: return "validate";
    case Stage::Usage: return "usage";
  }
  return "unknown";
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::UnknownVm: return "UnknownVm";
    case ErrorCode::UnknownGroup: return "UnknownGroup";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidPattern: return "InvalidPattern";
    case ErrorCode::NoRuleMatched: return "NoRuleMatched";
    case ErrorCode::IncompleteMatrix: return "IncompleteMatrix";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::MissingGroup: return "MissingGroup";
    case ErrorCode::MissingDescriptor: return "MissingDescriptor";
    case ErrorCode::EmptyScores: return "EmptyScores";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownFixture: return "UnknownFixture";
    case ErrorCode::NoRecords: return "NoRecords";
    case ErrorCode::NonPositiveSeconds: return "NonPositiveSeconds";
    case ErrorCode::TooFewShared: return "TooFewShared";
    case ErrorCode::DegenerateRanks: return "DegenerateRanks";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

namespace {

std::string format_message(Stage stage, ErrorCode code, const std::string& message) {
  std::string out;
  out.reserve(message.size() + 32);
  out += '[';
  out += to_string(stage);
  out += "] ";
  out += to_string(code);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(Stage stage, ErrorCode code, const std::string& message)
    : std::runtime_error(format_message(stage, code, message)),
      stage_(stage),
      code_(code),
      detail_(message) {}

}  // namespace vmrank

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vmrank {

/// Pipeline stage an error is attributed to. Surfaced in CLI messages and
/// HTTP error bodies so parse problems can be told apart from scoring ones.
enum class Stage {
  Parse,
  Fixture,
  Aggregate,
  Normalize,
  Score,
  Rank,
  Sweep,
  Validate,
  Usage,
};

enum class ErrorCode {
  EmptyInput,
  MalformedRow,
  UnknownAttribute,
  UnknownVm,
  UnknownGroup,
  DuplicateId,
  InvalidPattern,
  NoRuleMatched,
  IncompleteMatrix,
  NonFinite,
  MissingGroup,
  MissingDescriptor,
  EmptyScores,
  InvalidWeights,
  InvalidArgument,
  UnknownFixture,
  NoRecords,
  NonPositiveSeconds,
  TooFewShared,
  DegenerateRanks,
  InvariantViolation,
};

std::string_view to_string(Stage stage) noexcept;
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Stage stage, ErrorCode code, const std::string& message);

  Stage stage() const noexcept { return stage_; }
  ErrorCode code() const noexcept { return code_; }
  /// Message without the "[stage] Code:" prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Stage stage_;
  ErrorCode code_;
  std::string detail_;
};

}  // namespace vmrank

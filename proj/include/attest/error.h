// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#ifndef ATTEST_ERROR_H_
#define ATTEST_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace attest {

enum class ErrorCode {
  kZeroInverse,
  kOutOfRange,
  kOverflow,
  kEmptyLeafSet,
  kIndexOutOfRange,
  kTargetPresent,
  kTooManyIndices,
  kEmptyAcceptedSet,
  kSchemaMismatch,
  kEmptyOutput,
  kChallengeCountExceedsRows,
  kDimensionMismatch,
  kInvalidPriorOpening,
  kRecordNotFound,
  kGroupColumnOutOfRange,
  kUnlinkedInput,
  kNonContiguousIndex,
  kMissingProofBlob,
  kUnknownLabel,
  kConfigInvalid,
  kMissingPrerequisiteStage,
  kExistingStage,
  kDecodeError,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

// Every failure the library reports through an exception carries one of the
// codes above; verification outcomes are returned as values instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace attest

#endif  // ATTEST_ERROR_H_

// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/error.h"

namespace attest {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroInverse: return "ZeroInverse";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kEmptyLeafSet: return "EmptyLeafSet";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kTargetPresent: return "TargetPresent";
    case ErrorCode::kTooManyIndices: return "TooManyIndices";
    case ErrorCode::kEmptyAcceptedSet: return "EmptyAcceptedSet";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kEmptyOutput: return "EmptyOutput";
    case ErrorCode::kChallengeCountExceedsRows: return "ChallengeCountExceedsRows";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidPriorOpening: return "InvalidPriorOpening";
    case ErrorCode::kRecordNotFound: return "RecordNotFound";
    case ErrorCode::kGroupColumnOutOfRange: return "GroupColumnOutOfRange";
    case ErrorCode::kUnlinkedInput: return "UnlinkedInput";
    case ErrorCode::kNonContiguousIndex: return "NonContiguousIndex";
    case ErrorCode::kMissingProofBlob: return "MissingProofBlob";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kMissingPrerequisiteStage: return "MissingPrerequisiteStage";
    case ErrorCode::kExistingStage: return "ExistingStage";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace attest

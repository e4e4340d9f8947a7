// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kinesis {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kNonMonotone,
  kInsufficientData,
  kEmptyInput,
  kUnknownLabel,
  kDimensionMismatch,
  kFrozenParameter,
  kRankTooLarge,
  kClassDeficit,
  kNoAdapters,
  kIncompatibleModel,
  kOutOfBounds,
  kDuplicateId,
  kSchemaViolation,
  kTemplate,
  kMissingSlot,
  kUnknownSlot,
  kTransport,
  kClientError,
  kMissingArtifact,
  kIo,
  kFormat,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. `subject()` names the offending item when there is
/// one: a row number, a label, a slot, a JSON field path, an artifact.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string subject = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace kinesis

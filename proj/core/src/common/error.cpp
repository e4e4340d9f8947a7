// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/common/error.hpp"

namespace kinesis {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kNonMonotone: return "non_monotone";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kUnknownLabel: return "unknown_label";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kFrozenParameter: return "frozen_parameter";
    case ErrorCode::kRankTooLarge: return "rank_too_large";
    case ErrorCode::kClassDeficit: return "class_deficit";
    case ErrorCode::kNoAdapters: return "no_adapters";
    case ErrorCode::kIncompatibleModel: return "incompatible_model";
    case ErrorCode::kOutOfBounds: return "out_of_bounds";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kSchemaViolation: return "schema_violation";
    case ErrorCode::kTemplate: return "template";
    case ErrorCode::kMissingSlot: return "missing_slot";
    case ErrorCode::kUnknownSlot: return "unknown_slot";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kClientError: return "client_error";
    case ErrorCode::kMissingArtifact: return "missing_artifact";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kFormat: return "format";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::string subject)
    : std::runtime_error(message), code_(code), subject_(std::move(subject)) {}

}  // namespace kinesis

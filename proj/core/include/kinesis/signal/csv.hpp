// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "kinesis/signal/sequence.hpp"

namespace kinesis::signal {

inline constexpr const char* kSignalCsvHeader = "t,ax,ay,az,gx,gy,gz";

/// Contents of the optional `<stem>.meta.json` file next to a signal CSV.
struct SignalMetadata {
  std::optional<double> rate_hz;
  std::optional<std::string> subject_id;
};

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Parses a signal CSV. The rate comes from the sidecar when present,
/// otherwise from the median sample spacing (canonical rate for < 2 rows).
/// Throws kParse (subject = 1-based line number) or kNonMonotone
/// (subject = 0-based sample index).
SignalSequence load_signal(const std::filesystem::path& path);

/// load_signal followed by resampling to the canonical rate.
SignalSequence ingest_signal(const std::filesystem::path& path);

/// Writes CSV plus sidecar. Values use shortest round-trip formatting.
void save_signal(const std::filesystem::path& path, const SignalSequence& seq);

}  // namespace kinesis::signal

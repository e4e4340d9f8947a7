// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kinesis/signal/sequence.hpp"

namespace kinesis::signal {

struct WindowConfig {
  std::size_t length = 300;  // L_w, frames
  std::size_t step = 75;     // L_s, frames

  /// Throws kInvalidArgument unless 0 < step <= length.
  void validate() const;
  /// step = length / divisor (at least 1).
  static WindowConfig with_overlap(std::size_t length, std::size_t divisor);

  friend bool operator==(const WindowConfig&, const WindowConfig&) = default;
};

/// A window over frames [start, start + valid); frames past `valid` up to the
/// window length are zero padding.
struct WindowSpan {
  std::size_t start = 0;
  std::size_t valid = 0;

  std::size_t end() const { return start + valid; }
  friend bool operator==(const WindowSpan&, const WindowSpan&) = default;
};

/// Starts at 0, step, 2*step, ... while the window fits; if the grid leaves
/// a tail uncovered, one more window anchored at max(0, n - length). A
/// sequence shorter than the window yields a single padded window.
std::vector<WindowSpan> slice_windows(std::size_t n_frames, const WindowConfig& cfg);
std::vector<WindowSpan> slice_windows(const SignalSequence& seq, const WindowConfig& cfg);

/// Number of windows covering each frame.
std::vector<std::size_t> coverage_counts(std::size_t n_frames, const WindowConfig& cfg);

/// length x channels block for `span`, zero padded past span.valid.
Frames extract_window(const Frames& frames, const WindowSpan& span, std::size_t length);

void to_json(nlohmann::json& j, const WindowConfig& cfg);
void from_json(const nlohmann::json& j, WindowConfig& cfg);

}  // namespace kinesis::signal

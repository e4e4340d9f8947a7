// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>

#include <nlohmann/json_fwd.hpp>

#include "kinesis/signal/sequence.hpp"

namespace kinesis::signal {

/// Linear interpolation onto the grid t0 + k / target_rate covering
/// [t0, t_last]. Requires at least two samples.
SignalSequence resample(const SignalSequence& seq, double target_rate_hz);

/// Smallest standard deviation a channel is allowed to have.
inline constexpr double kMinChannelStd = 1e-8;

struct NormStats {
  std::array<double, kChannels> mean{};
  std::array<double, kChannels> std{1, 1, 1, 1, 1, 1};

  /// Zero mean, unit std: applying it is the identity.
  static NormStats identity() { return {}; }

  friend bool operator==(const NormStats&, const NormStats&) = default;
};

/// Population mean and std per channel over every sample of the corpus.
NormStats fit_norm_stats(std::span<const SignalSequence> corpus);
NormStats fit_norm_stats(std::span<const Frames> corpus);

SignalSequence apply_norm(const SignalSequence& seq, const NormStats& stats);
SignalSequence invert_norm(const SignalSequence& seq, const NormStats& stats);
void normalize_in_place(Frames& frames, const NormStats& stats);

void to_json(nlohmann::json& j, const NormStats& stats);
void from_json(const nlohmann::json& j, NormStats& stats);

}  // namespace kinesis::signal

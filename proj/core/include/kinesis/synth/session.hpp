// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinesis/pipeline/triplet.hpp"
#include "kinesis/signal/sequence.hpp"
#include "kinesis/synth/pool.hpp"

namespace kinesis::synth {

/// Script label for idle time between actions; produces no triplet.
inline constexpr const char* kRestLabel = "rest";

struct SessionEntry {
  double duration_s = 0.0;
  std::string label;
  double score = 0.0;
};

/// What one student does during a simulated lesson, in order.
struct SessionScript {
  std::string student_id;
  std::vector<std::string> labels;  // declared vocabulary; `rest` is always allowed
  std::vector<SessionEntry> entries;

  /// Throws on non-positive durations, scores outside [0,5], or labels
  /// outside the declared vocabulary (kUnknownLabel).
  void validate() const;
};

void to_json(nlohmann::json& j, const SessionScript& s);
void from_json(const nlohmann::json& j, SessionScript& s);

struct SessionConfig {
  double rate_hz = signal::kCanonicalRateHz;
  std::size_t blend_width = 10;
  std::uint64_t seed = 0;
};

struct SimulatedSession {
  signal::SignalSequence signal;
  std::vector<pipeline::ActionTriplet> triplets;
};

/// Renders the script entry by entry. Labels found in `pool` use its clips
/// (oscillation scaled by the entry score); others are rendered from their
/// parametric signature.
SimulatedSession simulate_class_session(const SessionScript& script, const LabeledSegmentPool& pool,
                                        const SessionConfig& cfg);

/// Reads a JSON array of scripts.
std::vector<SessionScript> load_scripts(const std::string& path);

}  // namespace kinesis::synth

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kinesis/signal/sequence.hpp"

namespace kinesis::synth {

inline constexpr const char* kMotionClass = "motion";
inline constexpr const char* kStationaryClass = "stationary";

/// A clip plus the label it was recorded under.
struct PoolSegment {
  signal::Frames frames;
  std::string source_label;
};

/// Clips grouped by class label, all at one sampling rate.
class LabeledSegmentPool {
 public:
  explicit LabeledSegmentPool(double rate_hz = signal::kCanonicalRateHz);

  /// Throws kInvalidArgument for an empty clip.
  void add(const std::string& label, PoolSegment segment);
  void add(const std::string& label, const signal::SignalSequence& clip);

  double rate() const { return rate_; }
  bool contains(const std::string& label) const { return classes_.contains(label); }
  std::vector<std::string> labels() const;
  const std::vector<PoolSegment>& segments(const std::string& label) const;
  std::size_t count(const std::string& label) const;
  std::size_t total_segments() const;
  bool empty() const { return classes_.empty(); }

 private:
  double rate_;
  std::map<std::string, std::vector<PoolSegment>> classes_;
};

/// Declared motion/stationary split of a label vocabulary.
struct BinaryPartition {
  std::set<std::string> motion;
  std::set<std::string> stationary;
};

/// Collapses a labelled pool into {motion, stationary}; each clip keeps its
/// original label as `source_label`. Throws kUnknownLabel for a label in
/// neither set (or both).
LabeledSegmentPool relabel_binary(const LabeledSegmentPool& pool, const BinaryPartition& partition);

/// Pool of rendered clips, `clips_per_label` per label, lengths uniform in
/// [min_frames, max_frames].
LabeledSegmentPool make_parametric_pool(const std::vector<std::string>& labels, std::size_t clips_per_label,
                                        std::size_t min_frames, std::size_t max_frames, std::uint64_t seed,
                                        double rate_hz = signal::kCanonicalRateHz);

}  // namespace kinesis::synth

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinesis/synth/generator.hpp"

namespace kinesis::motion {

/// Half-open frame range [begin, end).
struct FrameInterval {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - begin; }
  friend bool operator==(const FrameInterval&, const FrameInterval&) = default;
};

struct SegmentConfig {
  double threshold = 0.5;
  std::size_t min_length = 25;  // frames
  std::size_t merge_gap = 15;   // frames
};

void to_json(nlohmann::json& j, const SegmentConfig& cfg);
void from_json(const nlohmann::json& j, SegmentConfig& cfg);

/// Runs of p >= threshold; runs separated by fewer than merge_gap frames
/// are joined, then runs shorter than min_length are dropped.
std::vector<FrameInterval> extract_segments(const std::vector<double>& probs, const SegmentConfig& cfg);

/// Maximal runs of 1s.
std::vector<FrameInterval> mask_runs(const synth::MotionMask& mask);

/// Binary mask of length n with the intervals set.
synth::MotionMask intervals_to_mask(const std::vector<FrameInterval>& intervals, std::size_t n);

double interval_iou(const FrameInterval& a, const FrameInterval& b);

}  // namespace kinesis::motion

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/motion/segments.hpp"

#include <algorithm>

#include "kinesis/common/error.hpp"

namespace kinesis::motion {

void to_json(nlohmann::json& j, const SegmentConfig& cfg) {
  j = {{"threshold", cfg.threshold}, {"min_length", cfg.min_length}, {"merge_gap", cfg.merge_gap}};
}

void from_json(const nlohmann::json& j, SegmentConfig& cfg) {
  SegmentConfig d;
  cfg.threshold = j.value("threshold", d.threshold);
  cfg.min_length = j.value("min_length", d.min_length);
  cfg.merge_gap = j.value("merge_gap", d.merge_gap);
}

std::vector<FrameInterval> extract_segments(const std::vector<double>& probs, const SegmentConfig& cfg) {
  if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold outside [0, 1]", "threshold");
  }
  std::vector<FrameInterval> runs;
  for (std::size_t i = 0; i < probs.size();) {
    if (probs[i] < cfg.threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < probs.size() && probs[j] >= cfg.threshold) ++j;
    if (!runs.empty() && i - runs.back().end < cfg.merge_gap) {
      runs.back().end = j;
    } else {
      runs.push_back({i, j});
    }
    i = j;
  }
  std::erase_if(runs, [&](const FrameInterval& r) { return r.length() < cfg.min_length; });
  return runs;
}

std::vector<FrameInterval> mask_runs(const synth::MotionMask& mask) {
  std::vector<FrameInterval> runs;
  for (std::size_t i = 0; i < mask.size();) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < mask.size() && mask[j]) ++j;
    runs.push_back({i, j});
    i = j;
  }
  return runs;
}

synth::MotionMask intervals_to_mask(const std::vector<FrameInterval>& intervals, std::size_t n) {
  synth::MotionMask mask(n, 0);
  for (const auto& r : intervals) {
    std::fill(mask.begin() + static_cast<std::ptrdiff_t>(std::min(r.begin, n)),
              mask.begin() + static_cast<std::ptrdiff_t>(std::min(r.end, n)), 1);
  }
  return mask;
}

double interval_iou(const FrameInterval& a, const FrameInterval& b) {
  const std::size_t lo = std::max(a.begin, b.begin);
  const std::size_t hi = std::min(a.end, b.end);
  const std::size_t inter = hi > lo ? hi - lo : 0;
  const std::size_t uni = a.length() + b.length() - inter;
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

}  // namespace kinesis::motion

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include <nlohmann/json.hpp>

#include "kinesis/motion/segments.hpp"

namespace kinesis::motion {

/// Frame-level scores with motion as the positive class. A ratio whose
/// denominator is zero is reported as 0 and flagged.
struct FrameScores {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  std::size_t true_negative = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

struct SegmentScores {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t matched = 0;  // gold runs with a predicted run at IoU >= 0.5
  double mean_best_iou = 0.0;
};

struct DetectionReport {
  FrameScores frames;
  SegmentScores segments;
};

/// Throws kDimensionMismatch for masks of different length.
DetectionReport eval_detection(const synth::MotionMask& predicted, const synth::MotionMask& gold);

/// Pools several (predicted, gold) pairs into one report.
DetectionReport eval_detection(const std::vector<synth::MotionMask>& predicted,
                               const std::vector<synth::MotionMask>& gold);

void finalize(FrameScores& s);

nlohmann::json to_json(const DetectionReport& r);

}  // namespace kinesis::motion

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace kinesis::pipeline {

inline constexpr double kMinScore = 0.0;
inline constexpr double kMaxScore = 5.0;

/// One recognized action: half-open interval in seconds, label, quality score.
struct ActionTriplet {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string label;
  double score = 0.0;
  bool low_confidence = false;

  double duration() const { return end_s - start_s; }
  friend bool operator==(const ActionTriplet&, const ActionTriplet&) = default;
};

/// Throws kSchemaViolation naming the offending field.
void validate(const ActionTriplet& t);

/// Sorted by start and pairwise disjoint.
bool is_ordered_disjoint(const std::vector<ActionTriplet>& triplets);

/// Intersection over union of two intervals; 0 when either is empty.
double interval_iou(double a_start, double a_end, double b_start, double b_end);

struct TripletMatch {
  std::size_t gold = 0;
  std::size_t matched = 0;  // gold triplets with a same-label prediction at IoU >= threshold
  std::vector<bool> gold_matched;
  double recall() const { return gold ? static_cast<double>(matched) / static_cast<double>(gold) : 0.0; }
};

/// Each gold triplet may be claimed by at most one prediction.
TripletMatch match_triplets(const std::vector<ActionTriplet>& gold, const std::vector<ActionTriplet>& predicted,
                            double min_iou = 0.5);

}  // namespace kinesis::pipeline

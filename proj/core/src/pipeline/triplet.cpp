// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/pipeline/triplet.hpp"

#include <algorithm>
#include <cmath>

#include "kinesis/common/error.hpp"

namespace kinesis::pipeline {

void validate(const ActionTriplet& t) {
  if (!std::isfinite(t.start_s) || t.start_s < 0.0) {
    throw Error(ErrorCode::kSchemaViolation, "start must be a finite non-negative time", "start_s");
  }
  if (!std::isfinite(t.end_s) || !(t.start_s < t.end_s)) {
    throw Error(ErrorCode::kSchemaViolation, "end must be after start", "end_s");
  }
  if (t.label.empty()) throw Error(ErrorCode::kSchemaViolation, "label is empty", "label");
  if (!std::isfinite(t.score) || t.score < kMinScore || t.score > kMaxScore) {
    throw Error(ErrorCode::kSchemaViolation, "score outside [0, 5]", "score");
  }
}

bool is_ordered_disjoint(const std::vector<ActionTriplet>& triplets) {
  for (std::size_t i = 1; i < triplets.size(); ++i) {
    if (triplets[i].start_s < triplets[i - 1].end_s) return false;
  }
  return true;
}

double interval_iou(double a_start, double a_end, double b_start, double b_end) {
  const double inter = std::max(0.0, std::min(a_end, b_end) - std::max(a_start, b_start));
  const double uni = std::max(a_end, b_end) - std::min(a_start, b_start);
  if (a_end <= a_start || b_end <= b_start || uni <= 0.0) return 0.0;
  return inter / uni;
}

TripletMatch match_triplets(const std::vector<ActionTriplet>& gold, const std::vector<ActionTriplet>& predicted,
                            double min_iou) {
  TripletMatch m;
  m.gold = gold.size();
  m.gold_matched.assign(gold.size(), false);
  std::vector<bool> used(predicted.size(), false);
  for (std::size_t g = 0; g < gold.size(); ++g) {
    double best = min_iou;
    std::size_t pick = predicted.size();
    for (std::size_t p = 0; p < predicted.size(); ++p) {
      if (used[p] || predicted[p].label != gold[g].label) continue;
      const double iou = interval_iou(gold[g].start_s, gold[g].end_s, predicted[p].start_s, predicted[p].end_s);
      if (iou >= best) best = iou, pick = p;
    }
    if (pick < predicted.size()) {
      used[pick] = true;
      m.gold_matched[g] = true;
      ++m.matched;
    }
  }
  return m;
}

}  // namespace kinesis::pipeline

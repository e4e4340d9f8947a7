// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/motion/metrics.hpp"

#include <algorithm>

#include "kinesis/common/error.hpp"

namespace kinesis::motion {

namespace {

double ratio(std::size_t num, std::size_t den, bool& undefined) {
  undefined = den == 0;
  return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

void accumulate(const synth::MotionMask& predicted, const synth::MotionMask& gold, DetectionReport& r,
                double& iou_sum) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "predicted and gold masks differ in length");
  }
  auto& f = r.frames;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predicted[i] != 0;
    const bool g = gold[i] != 0;
    f.true_positive += p && g;
    f.false_positive += p && !g;
    f.false_negative += !p && g;
    f.true_negative += !p && !g;
  }
  const auto gold_runs = mask_runs(gold);
  const auto pred_runs = mask_runs(predicted);
  r.segments.gold += gold_runs.size();
  r.segments.predicted += pred_runs.size();
  for (const auto& g : gold_runs) {
    double best = 0.0;
    for (const auto& p : pred_runs) best = std::max(best, interval_iou(g, p));
    iou_sum += best;
    if (best >= 0.5) ++r.segments.matched;
  }
}

}  // namespace

void finalize(FrameScores& s) {
  s.precision = ratio(s.true_positive, s.true_positive + s.false_positive, s.precision_undefined);
  s.recall = ratio(s.true_positive, s.true_positive + s.false_negative, s.recall_undefined);
  s.f1_undefined = s.precision + s.recall == 0.0;
  s.f1 = s.f1_undefined ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
}

DetectionReport eval_detection(const synth::MotionMask& predicted, const synth::MotionMask& gold) {
  return eval_detection(std::vector<synth::MotionMask>{predicted}, std::vector<synth::MotionMask>{gold});
}

DetectionReport eval_detection(const std::vector<synth::MotionMask>& predicted,
                               const std::vector<synth::MotionMask>& gold) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "predicted and gold mask lists differ in count");
  }
  DetectionReport r;
  double iou_sum = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) accumulate(predicted[i], gold[i], r, iou_sum);
  finalize(r.frames);
  r.segments.mean_best_iou = r.segments.gold ? iou_sum / static_cast<double>(r.segments.gold) : 0.0;
  return r;
}

nlohmann::json to_json(const DetectionReport& r) {
  const auto& f = r.frames;
  const auto& s = r.segments;
  return {{"frame",
           {{"true_positive", f.true_positive},
            {"false_positive", f.false_positive},
            {"false_negative", f.false_negative},
            {"true_negative", f.true_negative},
            {"precision", f.precision},
            {"recall", f.recall},
            {"f1", f.f1},
            {"precision_undefined", f.precision_undefined},
            {"recall_undefined", f.recall_undefined},
            {"f1_undefined", f.f1_undefined}}},
          {"segment",
           {{"gold", s.gold}, {"predicted", s.predicted}, {"matched_iou_0_5", s.matched},
            {"mean_best_iou", s.mean_best_iou}}}};
}

}  // namespace kinesis::motion

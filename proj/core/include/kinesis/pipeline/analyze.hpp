// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinesis/motion/detector.hpp"
#include "kinesis/motion/segments.hpp"
#include "kinesis/pipeline/triplet.hpp"
#include "kinesis/quality/scorer.hpp"
#include "kinesis/recog/encoder.hpp"
#include "kinesis/recog/labels.hpp"
#include "kinesis/recog/text_provider.hpp"
#include "kinesis/signal/sequence.hpp"

namespace kinesis::pipeline {

struct AnalyzeConfig {
  std::optional<signal::WindowConfig> window;  // detector's own when unset
  motion::SegmentConfig segments;
  /// Top cosine similarity below this marks the triplet low-confidence.
  double confidence_floor = 0.0;
  /// Best-minus-runner-up margin below this marks it too; 0 disables.
  double min_margin = 0.0;
};

void to_json(nlohmann::json& j, const AnalyzeConfig& cfg);
void from_json(const nlohmann::json& j, AnalyzeConfig& cfg);

/// The three trained models plus the label vocabulary they serve.
struct ModelSet {
  motion::Detector detector;
  recog::SignalEncoder encoder;
  recog::TextEmbeddingProvider provider;
  quality::Scorer scorer;
  recog::LabelSet labels;
};

/// Throws kIncompatibleModel when channel counts or embedding widths disagree
/// or the provider cannot embed a label.
void check_compatibility(const motion::Detector& detector, const recog::SignalEncoder& encoder,
                         const recog::TextEmbeddingProvider& provider, const quality::Scorer& scorer,
                         const recog::LabelSet& labels);

/// Motion segments, then a label and a score for each. Output is sorted and
/// disjoint; times are frame / canonical rate. Throws kIncompatibleModel for a
/// signal at any other rate.
std::vector<ActionTriplet> analyze_sequence(const motion::Detector& detector, const recog::SignalEncoder& encoder,
                                            const recog::TextEmbeddingProvider& provider,
                                            const quality::Scorer& scorer, const recog::LabelSet& labels,
                                            const signal::SignalSequence& seq, const AnalyzeConfig& cfg);

std::vector<ActionTriplet> analyze_sequence(const ModelSet& models, const signal::SignalSequence& seq,
                                            const AnalyzeConfig& cfg);

/// One result per input, in input order. Up to `threads` sequences run at once
/// against the shared models; 0 picks the hardware concurrency.
std::vector<std::vector<ActionTriplet>> analyze_many(const ModelSet& models,
                                                     const std::vector<signal::SignalSequence>& seqs,
                                                     const AnalyzeConfig& cfg, unsigned threads = 0);

}  // namespace kinesis::pipeline

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinesis/recog/contrastive.hpp"

namespace kinesis::recog {

struct ClassScores {
  std::size_t support = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct RecognitionReport {
  LabelSet labels;
  std::size_t total = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassScores> classes;
  std::vector<std::vector<std::size_t>> confusion;  // [gold][predicted]
};

/// Scores index predictions; zero denominators give 0.
RecognitionReport score_predictions(const std::vector<std::size_t>& gold, const std::vector<std::size_t>& predicted,
                                    const LabelSet& labels);

/// Classifies every test segment. Throws kEmptyInput or kUnknownLabel.
RecognitionReport eval_recognition(const SignalEncoder& encoder, const TextEmbeddingProvider& provider,
                                   const std::vector<LabeledSegment>& test, const LabelSet& labels);

nlohmann::json to_json(const RecognitionReport& r);

/// CSV with a `gold\predicted` corner cell and label headers.
void save_confusion_csv(const std::filesystem::path& path, const RecognitionReport& r);

}  // namespace kinesis::recog

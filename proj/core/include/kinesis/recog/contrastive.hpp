// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinesis/recog/encoder.hpp"
#include "kinesis/recog/labels.hpp"
#include "kinesis/recog/text_provider.hpp"
#include "kinesis/signal/sequence.hpp"

namespace kinesis::recog {

struct LabeledSegment {
  signal::Frames frames;
  std::string label;
};

struct ContrastiveConfig {
  double temperature = 0.07;
  std::size_t batch_size = 32;
  std::size_t epochs = 10;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  double validation_fraction = 0.1;  // pretraining only
  double weight_decay = 0.0;
  double clip_norm = 1.0;

  void validate() const;
};

void to_json(nlohmann::json& j, const ContrastiveConfig& c);
void from_json(const nlohmann::json& j, ContrastiveConfig& c);

/// Symmetric multi-positive InfoNCE between rows of unit-norm signal and
/// label embeddings. Rows sharing a class id are positives for each other
/// in both directions. Writes dL/dsignal into `grad` when non-null.
double symmetric_infonce(const Eigen::MatrixXd& signal, const Eigen::MatrixXd& text,
                         const std::vector<std::size_t>& class_ids, double temperature, Eigen::MatrixXd* grad);

/// Mean loss over the data in fixed batches; no parameter changes.
double contrastive_loss(const SignalEncoder& encoder, const std::vector<LabeledSegment>& data,
                        const TextEmbeddingProvider& provider, const ContrastiveConfig& cfg);

/// Fits input normalisation on the training split and aligns the encoder
/// with the provider's label vectors. Throws kEmptyInput or kUnknownLabel.
SignalEncoder pretrain_contrastive(SignalEncoder encoder, const std::vector<LabeledSegment>& data,
                                   const TextEmbeddingProvider& provider, const ContrastiveConfig& cfg,
                                   EncoderRecord* record = nullptr);

/// Trains only the adapters on exactly `k` samples per label. Throws
/// kNoAdapters, kUnknownLabel, or kClassDeficit listing every class whose
/// count is not `k`.
SignalEncoder finetune_kshot(SignalEncoder encoder, const std::vector<LabeledSegment>& samples,
                             const LabelSet& labels, std::size_t k, const TextEmbeddingProvider& provider,
                             const ContrastiveConfig& cfg, EncoderRecord* record = nullptr);

/// First `k` samples of each label in `labels`, in pool order.
std::vector<LabeledSegment> take_kshot(const std::vector<LabeledSegment>& pool, const LabelSet& labels, std::size_t k);

/// Writes one CSV per segment under `dir/segments/` and a `segment_path,label`
/// manifest at `dir/manifest.csv`; returns the manifest path.
std::filesystem::path save_labeled_segments(const std::filesystem::path& dir,
                                            const std::vector<LabeledSegment>& segments);

/// Reads a `segment_path,label` manifest; paths are relative to it. Throws
/// kMissingArtifact for a missing manifest and kParse naming the line.
std::vector<LabeledSegment> load_labeled_segments(const std::filesystem::path& manifest);

}  // namespace kinesis::recog

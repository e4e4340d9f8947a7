// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinesis/nn/layers.hpp"
#include "kinesis/recog/encoder.hpp"
#include "kinesis/recog/text_provider.hpp"

namespace kinesis::quality {

inline constexpr const char* kScorerKind = "quality-scorer";
inline constexpr double kMaxScore = 5.0;

struct ScorerArch {
  int embedding_dim = 512;  // input is twice this
  int hidden1 = 256;
  int hidden2 = 64;
  friend bool operator==(const ScorerArch&, const ScorerArch&) = default;
};

/// Three-layer perceptron over [signal embedding, label embedding] with a
/// sigmoid scaled to [0, 5] on the output.
template <class T>
class BasicScorer {
 public:
  struct Cache {
    typename nn::Linear<T>::Cache fc1, fc2, fc3;
    nn::Matrix<T> pre1, pre2;
  };

  BasicScorer() : BasicScorer(ScorerArch{}, 0) {}
  BasicScorer(const ScorerArch& arch, std::uint64_t seed);

  const ScorerArch& arch() const { return arch_; }

  /// Raw output before squashing, one row per input row.
  nn::Matrix<T> logits(const nn::Matrix<T>& x) const;
  nn::Matrix<T> logits(const nn::Matrix<T>& x, Cache& cache) const;
  nn::Matrix<T> backward(const Cache& cache, const nn::Matrix<T>& dlogits);

  nn::ParameterRefs<T> parameters();
  std::vector<const nn::Parameter<T>*> parameters() const;
  std::string parameters_hash() const;

 private:
  ScorerArch arch_;
  nn::Linear<T> fc1_, fc2_, fc3_;
};

using Scorer = BasicScorer<float>;

inline double squash(double logit) { return kMaxScore * nn::sigmoid(logit); }

/// Score in [0, 5]. Throws kDimensionMismatch.
double score_segment(const Scorer& scorer, const Eigen::VectorXd& signal_embedding,
                     const Eigen::VectorXd& label_embedding);

/// A segment with a human-style quality score.
struct ScoredSample {
  std::string segment_path;
  signal::Frames frames;
  std::string label;
  double score = 0.0;
};

/// Reads `segment_path,label,score` rows; paths are relative to the
/// manifest and loaded at the canonical rate. Throws kParse naming the line.
std::vector<ScoredSample> load_scored_manifest(const std::filesystem::path& path);
void save_scored_manifest(const std::filesystem::path& path, const std::vector<ScoredSample>& samples);
/// Writes every sample's frames under `dir/segments/` plus `dir/manifest.csv`
/// pointing at them; returns the manifest path.
std::filesystem::path save_scored_samples(const std::filesystem::path& dir, std::vector<ScoredSample> samples);

struct ScorerTrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;
  double weight_decay = 0.0;
};

void to_json(nlohmann::json& j, const ScorerTrainConfig& c);
void from_json(const nlohmann::json& j, ScorerTrainConfig& c);

struct ScorerRecord {
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
  std::vector<double> loss_curve;
  std::vector<double> validation_mse;
  double baseline_mse = 0.0;  // held-out MSE of predicting the training mean
};

/// Embeds every sample with the frozen encoder/provider, then fits the MLP
/// with MSE on the squashed output. Throws kEmptyInput.
Scorer train_scorer(const std::vector<ScoredSample>& samples, const recog::SignalEncoder& encoder,
                    const recog::TextEmbeddingProvider& provider, const ScorerTrainConfig& cfg,
                    ScorerRecord* record = nullptr);

struct ScoreStats {
  std::size_t count = 0;
  double mse = 0.0;
  double pearson = 0.0;
  bool pearson_undefined = false;
};

/// Throws kInsufficientData for fewer than two pairs.
ScoreStats score_stats(const std::vector<double>& predicted, const std::vector<double>& gold);

ScoreStats eval_scorer(const Scorer& scorer, const std::vector<ScoredSample>& samples,
                       const recog::SignalEncoder& encoder, const recog::TextEmbeddingProvider& provider);

nlohmann::json to_json(const ScoreStats& s);

void save_scorer(const std::filesystem::path& path, const Scorer& scorer, const ScorerRecord& record = {});
Scorer load_scorer(const std::filesystem::path& path);

}  // namespace kinesis::quality

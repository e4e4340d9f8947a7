// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinesis/nn/attention.hpp"
#include "kinesis/nn/layers.hpp"
#include "kinesis/signal/ops.hpp"

namespace kinesis::recog {

inline constexpr const char* kEncoderKind = "signal-encoder";

struct EncoderArch {
  int patch = 10;          // frames per token
  int width = 128;
  int heads = 4;
  int ffn = 256;
  int layers = 6;
  int max_frames = 1500;   // longer inputs are truncated
  int dim = 512;           // output embedding size

  int max_tokens() const { return (max_frames + patch - 1) / patch; }
  friend bool operator==(const EncoderArch&, const EncoderArch&) = default;
};

void to_json(nlohmann::json& j, const EncoderArch& a);
void from_json(const nlohmann::json& j, EncoderArch& a);

/// Low-rank adapters on the attention query and value projections.
struct LoraConfig {
  int rank = 32;
  double alpha = 0.0;  // 0 means 2 * rank
  bool query = true;
  bool value = true;
  std::uint64_t seed = 0;

  double effective_alpha() const { return alpha > 0.0 ? alpha : 2.0 * rank; }
};

void to_json(nlohmann::json& j, const LoraConfig& c);
void from_json(const nlohmann::json& j, LoraConfig& c);

/// Patch tokenizer, transformer stack, mean pooling and a projection into
/// the label embedding space.
template <class T>
class BasicSignalEncoder {
 public:
  struct Cache {
    typename nn::Linear<T>::Cache patch;
    std::vector<typename nn::TransformerBlock<T>::Cache> blocks;
    typename nn::LayerNorm<T>::Cache final_norm;
    typename nn::Linear<T>::Cache projection;
    Eigen::Index tokens = 0;
  };

  BasicSignalEncoder() : BasicSignalEncoder(EncoderArch{}, 0) {}
  BasicSignalEncoder(const EncoderArch& arch, std::uint64_t seed);

  const EncoderArch& arch() const { return arch_; }
  const signal::NormStats& norm() const { return norm_; }
  void set_norm(const signal::NormStats& norm) { norm_ = norm; }

  /// Normalised, truncated, patched input: tokens x (patch * 6). The last
  /// patch is zero filled. Throws kEmptyInput / kDimensionMismatch.
  nn::Matrix<T> tokenize(const Eigen::Ref<const Eigen::MatrixXd>& frames) const;

  /// Unnormalised 1 x dim output for a token matrix.
  nn::Matrix<T> forward(const nn::Matrix<T>& tokens) const;
  nn::Matrix<T> forward(const nn::Matrix<T>& tokens, Cache& cache) const;
  /// Accumulates parameter gradients; returns d/dtokens.
  nn::Matrix<T> backward(const Cache& cache, const nn::Matrix<T>& dout);

  /// Unit-norm embedding of a segment.
  Eigen::VectorXd embed(const Eigen::Ref<const Eigen::MatrixXd>& frames) const;
  /// Embedding of the first `valid` frames; anything after is padding.
  Eigen::VectorXd embed(const Eigen::Ref<const Eigen::MatrixXd>& frames, std::size_t valid) const;

  /// Attaches adapters and freezes every base parameter. Throws
  /// kRankTooLarge for a rank outside [1, width].
  void inject_lora(const LoraConfig& cfg);
  bool has_lora() const;
  const LoraConfig& lora_config() const { return lora_; }
  /// Folds adapters into the base weights. Throws kNoAdapters.
  void merge_lora();
  void set_base_frozen(bool frozen);

  std::vector<nn::TransformerBlock<T>>& blocks() { return blocks_; }
  nn::Linear<T>& projection() { return projection_; }

  nn::ParameterRefs<T> parameters();
  std::vector<const nn::Parameter<T>*> parameters() const;
  std::vector<const nn::Parameter<T>*> base_parameters() const;
  std::vector<const nn::Parameter<T>*> adapter_parameters() const;
  std::string base_hash() const;
  std::string parameters_hash() const;
  std::size_t trainable_count() const;

 private:
  EncoderArch arch_;
  signal::NormStats norm_;
  nn::Linear<T> patch_;
  nn::Parameter<T> position_;
  std::vector<nn::TransformerBlock<T>> blocks_;
  nn::LayerNorm<T> final_norm_;
  nn::Linear<T> projection_;
  LoraConfig lora_;
};

using SignalEncoder = BasicSignalEncoder<float>;

struct EncoderRecord {
  std::string stage;  // "pretrain" or "finetune"
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
  std::vector<double> loss_curve;
  std::vector<double> validation_curve;
};

void save_encoder(const std::filesystem::path& path, const SignalEncoder& encoder,
                  const std::vector<EncoderRecord>& history = {});
SignalEncoder load_encoder(const std::filesystem::path& path, std::vector<EncoderRecord>* history = nullptr);

}  // namespace kinesis::recog

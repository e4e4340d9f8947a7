// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "kinesis/recog/labels.hpp"

namespace kinesis::recog {

inline constexpr std::size_t kEmbeddingDim = 512;

/// Frozen label-text embedding space. Either a table loaded from file or a
/// deterministic per-label random vector. Vectors are unit norm. There is
/// no mutating API, so no training step can change it.
class TextEmbeddingProvider {
 public:
  enum class Kind { kTable, kSeededRandom };

  static TextEmbeddingProvider seeded(std::uint64_t seed, std::size_t dim = kEmbeddingDim);

  /// Reads `d count` then `label<TAB>v1,...,vd` rows. Throws kParse with
  /// a line subject or kMissingArtifact.
  static TextEmbeddingProvider from_table(const std::filesystem::path& path);

  /// Writes the table format for `labels`.
  void save_table(const std::filesystem::path& path, const LabelSet& labels) const;

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }

  /// Throws kUnknownLabel for a table without the label.
  Eigen::VectorXd embed(const std::string& label) const;
  bool covers(const std::string& label) const;

  /// Row i is the embedding of labels[i].
  Eigen::MatrixXd embed_labels(const LabelSet& labels) const;

  /// Identity of the embedding space: kind, dimension and content.
  std::string hash() const;

 private:
  TextEmbeddingProvider() = default;

  Kind kind_ = Kind::kSeededRandom;
  std::size_t dim_ = kEmbeddingDim;
  std::uint64_t seed_ = 0;
  std::map<std::string, Eigen::VectorXd> table_;
};

}  // namespace kinesis::recog

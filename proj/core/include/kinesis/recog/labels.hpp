// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace kinesis::recog {

/// Ordered, duplicate-free label vocabulary. Order decides ties.
class LabelSet {
 public:
  LabelSet() = default;
  /// Throws kInvalidArgument when empty or kDuplicateId on a repeated label.
  explicit LabelSet(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::string& operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<std::size_t> find(const std::string& label) const;
  /// Throws kUnknownLabel.
  std::size_t index_of(const std::string& label) const;
  bool contains(const std::string& label) const { return find(label).has_value(); }

  auto begin() const { return labels_.begin(); }
  auto end() const { return labels_.end(); }
  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<std::string> labels_;
};

struct Classification {
  std::size_t index = 0;
  std::string label;
  std::vector<double> similarities;  // cosine, one per label
};

/// Cosine similarity of `embedding` against every row of `label_matrix`;
/// the first maximum wins. Both sides are normalised here even if they
/// already are. Throws kDimensionMismatch.
Classification classify(const Eigen::VectorXd& embedding, const Eigen::MatrixXd& label_matrix, const LabelSet& labels);

/// Difference between the best and runner-up similarity (best alone for a
/// single label).
double top_margin(const Classification& c);

}  // namespace kinesis::recog

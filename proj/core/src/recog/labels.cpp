// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/recog/labels.hpp"

#include <algorithm>
#include <set>

#include "kinesis/common/error.hpp"

namespace kinesis::recog {

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error(ErrorCode::kInvalidArgument, "label set is empty");
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw Error(ErrorCode::kInvalidArgument, "label set contains an empty label");
    if (!seen.insert(l).second) throw Error(ErrorCode::kDuplicateId, "duplicate label", l);
  }
}

std::optional<std::size_t> LabelSet::find(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t LabelSet::index_of(const std::string& label) const {
  const auto i = find(label);
  if (!i) throw Error(ErrorCode::kUnknownLabel, "label not in label set", label);
  return *i;
}

Classification classify(const Eigen::VectorXd& embedding, const Eigen::MatrixXd& label_matrix,
                        const LabelSet& labels) {
  if (label_matrix.cols() != embedding.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding has dimension " + std::to_string(embedding.size()) + " but label matrix has " +
                    std::to_string(label_matrix.cols()));
  }
  if (static_cast<std::size_t>(label_matrix.rows()) != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "label matrix rows differ from label count");
  }
  const double norm = embedding.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::kInvalidArgument, "embedding has zero norm");
  const Eigen::VectorXd f = embedding / norm;
  Classification c;
  c.similarities.resize(labels.size());
  double best = -2.0;
  for (Eigen::Index i = 0; i < label_matrix.rows(); ++i) {
    const double rn = label_matrix.row(i).norm();
    const double sim = rn > 0.0 ? std::clamp(label_matrix.row(i).dot(f) / rn, -1.0, 1.0) : 0.0;
    c.similarities[static_cast<std::size_t>(i)] = sim;
    if (sim > best) {
      best = sim;
      c.index = static_cast<std::size_t>(i);
    }
  }
  c.label = labels[c.index];
  return c;
}

double top_margin(const Classification& c) {
  if (c.similarities.size() < 2) return c.similarities.empty() ? 0.0 : c.similarities.front();
  double runner_up = -2.0;
  for (std::size_t i = 0; i < c.similarities.size(); ++i) {
    if (i != c.index) runner_up = std::max(runner_up, c.similarities[i]);
  }
  return c.similarities[c.index] - runner_up;
}

}  // namespace kinesis::recog

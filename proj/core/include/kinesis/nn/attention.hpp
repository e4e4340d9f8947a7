// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "kinesis/nn/layers.hpp"

namespace kinesis::nn {

/// Multi-head self-attention over one token sequence (tokens x width).
/// Sequences are never padded, so no attention mask is needed.
template <class T>
class SelfAttention {
 public:
  struct Cache {
    typename Linear<T>::Cache q, k, v, out;
    Matrix<T> queries, keys, values;
    std::vector<Matrix<T>> probs;  // per head, tokens x tokens
  };

  SelfAttention() = default;
  SelfAttention(const std::string& name, Eigen::Index width, int heads);

  void init(Rng& rng);
  Matrix<T> forward(const Matrix<T>& x) const;
  Matrix<T> forward(const Matrix<T>& x, Cache& cache) const;
  Matrix<T> backward(const Cache& cache, const Matrix<T>& dy);

  Linear<T>& query() { return query_; }
  Linear<T>& key() { return key_; }
  Linear<T>& value() { return value_; }
  Linear<T>& output() { return output_; }
  const Linear<T>& query() const { return query_; }
  const Linear<T>& value() const { return value_; }
  int heads() const { return heads_; }

  void collect(ParameterRefs<T>& out);
  void collect(std::vector<const Parameter<T>*>& out) const;
  void set_frozen(bool frozen);

 private:
  Matrix<T> attend(const Matrix<T>& q, const Matrix<T>& k, const Matrix<T>& v,
                   std::vector<Matrix<T>>* probs) const;

  Linear<T> query_, key_, value_, output_;
  int heads_ = 1;
};

/// Pre-norm transformer block: x + attn(ln(x)), then + mlp(ln(.)).
template <class T>
class TransformerBlock {
 public:
  struct Cache {
    typename LayerNorm<T>::Cache ln1, ln2;
    typename SelfAttention<T>::Cache attn;
    typename Linear<T>::Cache fc1, fc2;
    Matrix<T> hidden;  // fc1 output, pre-activation
  };

  TransformerBlock() = default;
  TransformerBlock(const std::string& name, Eigen::Index width, int heads, Eigen::Index ffn_width);

  void init(Rng& rng);
  Matrix<T> forward(const Matrix<T>& x) const;
  Matrix<T> forward(const Matrix<T>& x, Cache& cache) const;
  Matrix<T> backward(const Cache& cache, const Matrix<T>& dy);

  SelfAttention<T>& attention() { return attn_; }
  const SelfAttention<T>& attention() const { return attn_; }

  void collect(ParameterRefs<T>& out);
  void collect(std::vector<const Parameter<T>*>& out) const;
  void set_frozen(bool frozen);

 private:
  LayerNorm<T> ln1_, ln2_;
  SelfAttention<T> attn_;
  Linear<T> fc1_, fc2_;
};

/// Row-wise softmax.
template <class T>
Matrix<T> softmax_rows(const Matrix<T>& logits);

}  // namespace kinesis::nn

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "kinesis/nn/parameter.hpp"

namespace kinesis::nn {

/// y = x W + b, with W stored in x out. An optional low-rank adapter adds
/// scale * (x A) B where A is in x r and B is r x out.
template <class T>
class Linear {
 public:
  struct Cache {
    Matrix<T> x;
    Matrix<T> lora_hidden;  // x A, only when an adapter is attached
  };

  Linear() = default;
  Linear(std::string name, Eigen::Index in_features, Eigen::Index out_features, bool bias = true);

  /// Weight uniform in +-1/sqrt(in), bias zero.
  void init(Rng& rng);

  Eigen::Index in_features() const { return weight_.rows(); }
  Eigen::Index out_features() const { return weight_.cols(); }
  const std::string& name() const { return name_; }

  Matrix<T> forward(const Matrix<T>& x) const;
  Matrix<T> forward(const Matrix<T>& x, Cache& cache) const;
  /// Accumulates parameter gradients (unless frozen) and returns dL/dx.
  Matrix<T> backward(const Cache& cache, const Matrix<T>& dy);

  Parameter<T>& weight() { return weight_; }
  const Parameter<T>& weight() const { return weight_; }
  bool has_bias() const { return bias_.has_value(); }
  Parameter<T>& bias() { return *bias_; }
  const Parameter<T>& bias() const { return *bias_; }

  /// Attaches an adapter with A ~ U(+-1/sqrt(in)), B = 0, scale = alpha / rank.
  void attach_lora(int rank, double alpha, Rng& rng);
  bool has_lora() const { return lora_.has_value(); }
  int lora_rank() const { return lora_ ? static_cast<int>(lora_->down.cols()) : 0; }
  T lora_scale() const { return lora_ ? lora_->scale : T(0); }
  Parameter<T>& lora_down() { return lora_->down; }
  Parameter<T>& lora_up() { return lora_->up; }
  const Parameter<T>& lora_down() const { return lora_->down; }
  const Parameter<T>& lora_up() const { return lora_->up; }
  /// Restores an adapter from stored tensors.
  void set_lora(Matrix<T> down, Matrix<T> up, T scale);
  /// Folds scale * A B into W and drops the adapter. Bypasses the freeze
  /// flag: the merged weight is a new base.
  void merge_lora();

  void collect(ParameterRefs<T>& out);
  void collect(std::vector<const Parameter<T>*>& out) const;
  void set_frozen(bool frozen);

 private:
  struct Lora {
    Parameter<T> down;
    Parameter<T> up;
    T scale;
  };

  std::string name_;
  Parameter<T> weight_;
  std::optional<Parameter<T>> bias_;
  std::optional<Lora> lora_;
};

/// Row-wise layer normalisation with learned gain and shift.
template <class T>
class LayerNorm {
 public:
  struct Cache {
    Matrix<T> xhat;
    Eigen::Matrix<T, Eigen::Dynamic, 1> rstd;
  };

  LayerNorm() = default;
  LayerNorm(std::string name, Eigen::Index width, T eps = T(1e-5));

  Matrix<T> forward(const Matrix<T>& x) const;
  Matrix<T> forward(const Matrix<T>& x, Cache& cache) const;
  Matrix<T> backward(const Cache& cache, const Matrix<T>& dy);

  Parameter<T>& gain() { return gain_; }
  Parameter<T>& shift() { return shift_; }
  void collect(ParameterRefs<T>& out);
  void collect(std::vector<const Parameter<T>*>& out) const;
  void set_frozen(bool frozen);

 private:
  Parameter<T> gain_;
  Parameter<T> shift_;
  T eps_ = T(1e-5);
};

/// tanh-approximated GELU and its derivative.
template <class T>
Matrix<T> gelu(const Matrix<T>& x);
template <class T>
Matrix<T> gelu_backward(const Matrix<T>& x, const Matrix<T>& dy);

template <class T>
T sigmoid(T x) {
  return x >= T(0) ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}

}  // namespace kinesis::nn

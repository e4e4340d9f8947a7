// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "kinesis/common/error.hpp"
#include "kinesis/common/rng.hpp"

namespace kinesis::nn {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Named trainable tensor with a lazily allocated gradient. A frozen
/// parameter rejects mutation and ignores gradient accumulation.
template <class T>
class Parameter {
 public:
  Parameter() = default;
  Parameter(std::string name, Matrix<T> value) : name_(std::move(name)), value_(std::move(value)) {}

  const std::string& name() const { return name_; }
  const Matrix<T>& value() const { return value_; }
  Eigen::Index rows() const { return value_.rows(); }
  Eigen::Index cols() const { return value_.cols(); }
  Eigen::Index size() const { return value_.size(); }

  Matrix<T>& mutable_value() {
    if (frozen_) throw Error(ErrorCode::kFrozenParameter, "parameter '" + name_ + "' is frozen", name_);
    return value_;
  }

  bool frozen() const { return frozen_; }
  void set_frozen(bool frozen) { frozen_ = frozen; }

  /// Gradient buffer, zero-initialised on first use.
  Matrix<T>& grad() {
    if (grad_.rows() != value_.rows() || grad_.cols() != value_.cols()) {
      grad_ = Matrix<T>::Zero(value_.rows(), value_.cols());
    }
    return grad_;
  }
  void zero_grad() {
    if (grad_.size() != 0) grad_.setZero();
  }
  bool trainable() const { return !frozen_; }

 private:
  std::string name_;
  Matrix<T> value_;
  Matrix<T> grad_;
  bool frozen_ = false;
};

template <class T>
using ParameterRefs = std::vector<Parameter<T>*>;

template <class T>
void fill_uniform(Matrix<T>& m, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(dist(rng));
}

template <class T>
void fill_normal(Matrix<T>& m, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(dist(rng));
}

/// SHA-256 over names, shapes and raw values, in list order.
template <class T>
std::string parameters_hash(const std::vector<const Parameter<T>*>& params);

template <class T>
std::size_t parameter_count(const ParameterRefs<T>& params, bool trainable_only) {
  std::size_t n = 0;
  for (const auto* p : params) {
    if (!trainable_only || p->trainable()) n += static_cast<std::size_t>(p->size());
  }
  return n;
}

}  // namespace kinesis::nn

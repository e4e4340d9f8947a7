// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "kinesis/nn/layers.hpp"

namespace kinesis::nn {

/// Unidirectional LSTM layer over a batch of equal-length sequences.
///
/// Inputs and outputs are time-major: row t * batch + b holds step t of
/// sequence b. Gate order in the packed weights is input, forget, cell, output.
template <class T>
class LstmLayer {
 public:
  struct Cache {
    Matrix<T> input;
    Matrix<T> gates;      // activated gates, rows x 4H
    Matrix<T> cells;      // c_t
    Matrix<T> cell_tanh;  // tanh(c_t)
    Matrix<T> hidden;     // h_t
  };

  LstmLayer() = default;
  LstmLayer(const std::string& name, Eigen::Index input_size, Eigen::Index hidden_size);

  /// Uniform +-1/sqrt(H) weights, zero bias except forget gate = 1.
  void init(Rng& rng);

  Eigen::Index input_size() const { return input_weight_.rows(); }
  Eigen::Index hidden_size() const { return recurrent_weight_.rows(); }

  Matrix<T> forward(const Matrix<T>& x, Eigen::Index batch) const;
  Matrix<T> forward(const Matrix<T>& x, Eigen::Index batch, Cache& cache) const;
  Matrix<T> backward(const Cache& cache, const Matrix<T>& dh, Eigen::Index batch);

  Parameter<T>& input_weight() { return input_weight_; }
  Parameter<T>& recurrent_weight() { return recurrent_weight_; }
  Parameter<T>& bias() { return bias_; }

  void collect(ParameterRefs<T>& out);
  void collect(std::vector<const Parameter<T>*>& out) const;

 private:
  Matrix<T> run(const Matrix<T>& x, Eigen::Index batch, Cache* cache) const;

  Parameter<T> input_weight_;      // in x 4H
  Parameter<T> recurrent_weight_;  // H x 4H
  Parameter<T> bias_;              // 1 x 4H
};

template <class T>
class LstmStack {
 public:
  struct Cache {
    std::vector<typename LstmLayer<T>::Cache> layers;
  };

  LstmStack() = default;
  LstmStack(const std::string& name, Eigen::Index input_size, Eigen::Index hidden_size, int layers);

  void init(Rng& rng);
  int num_layers() const { return static_cast<int>(layers_.size()); }
  Eigen::Index input_size() const { return layers_.front().input_size(); }
  Eigen::Index hidden_size() const { return layers_.front().hidden_size(); }

  Matrix<T> forward(const Matrix<T>& x, Eigen::Index batch) const;
  Matrix<T> forward(const Matrix<T>& x, Eigen::Index batch, Cache& cache) const;
  Matrix<T> backward(const Cache& cache, const Matrix<T>& dh, Eigen::Index batch);

  LstmLayer<T>& layer(int i) { return layers_[static_cast<std::size_t>(i)]; }
  void collect(ParameterRefs<T>& out);
  void collect(std::vector<const Parameter<T>*>& out) const;

 private:
  std::vector<LstmLayer<T>> layers_;
};

}  // namespace kinesis::nn

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/nn/lstm.hpp"

#include <cmath>

namespace kinesis::nn {

namespace {

template <class Block>
void sigmoid_in_place(Block&& b) {
  using T = typename std::decay_t<Block>::Scalar;
  b = (T(1) + (-b.array()).exp()).inverse().matrix();
}

}  // namespace

template <class T>
LstmLayer<T>::LstmLayer(const std::string& name, Eigen::Index input_size, Eigen::Index hidden_size)
    : input_weight_(name + ".input_weight", Matrix<T>::Zero(input_size, 4 * hidden_size)),
      recurrent_weight_(name + ".recurrent_weight", Matrix<T>::Zero(hidden_size, 4 * hidden_size)),
      bias_(name + ".bias", Matrix<T>::Zero(1, 4 * hidden_size)) {}

template <class T>
void LstmLayer<T>::init(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size()));
  fill_uniform(input_weight_.mutable_value(), bound, rng);
  fill_uniform(recurrent_weight_.mutable_value(), bound, rng);
  auto& b = bias_.mutable_value();
  b.setZero();
  b.middleCols(hidden_size(), hidden_size()).setOnes();
}

template <class T>
Matrix<T> LstmLayer<T>::run(const Matrix<T>& x, Eigen::Index batch, Cache* cache) const {
  const Eigen::Index hs = hidden_size();
  const Eigen::Index rows = x.rows();
  const Eigen::Index steps = rows / batch;
  Matrix<T> gates = x * input_weight_.value();
  gates.rowwise() += bias_.value().row(0);

  Matrix<T> hidden(rows, hs);
  Matrix<T> cells(rows, hs);
  Matrix<T> cell_tanh(rows, hs);
  Matrix<T> h_prev = Matrix<T>::Zero(batch, hs);
  Matrix<T> c_prev = Matrix<T>::Zero(batch, hs);
  for (Eigen::Index t = 0; t < steps; ++t) {
    auto g = gates.middleRows(t * batch, batch);
    g.noalias() += h_prev * recurrent_weight_.value();
    sigmoid_in_place(g.leftCols(2 * hs));
    g.middleCols(2 * hs, hs) = g.middleCols(2 * hs, hs).array().tanh().matrix();
    sigmoid_in_place(g.rightCols(hs));

    auto c = cells.middleRows(t * batch, batch);
    c = g.middleCols(hs, hs).cwiseProduct(c_prev) + g.leftCols(hs).cwiseProduct(g.middleCols(2 * hs, hs));
    auto tc = cell_tanh.middleRows(t * batch, batch);
    tc = c.array().tanh().matrix();
    auto h = hidden.middleRows(t * batch, batch);
    h = g.rightCols(hs).cwiseProduct(tc);
    h_prev = h;
    c_prev = c;
  }
  if (cache) {
    cache->input = x;
    cache->gates = std::move(gates);
    cache->cells = std::move(cells);
    cache->cell_tanh = std::move(cell_tanh);
    cache->hidden = hidden;
  }
  return hidden;
}

template <class T>
Matrix<T> LstmLayer<T>::forward(const Matrix<T>& x, Eigen::Index batch) const {
  return run(x, batch, nullptr);
}

template <class T>
Matrix<T> LstmLayer<T>::forward(const Matrix<T>& x, Eigen::Index batch, Cache& cache) const {
  return run(x, batch, &cache);
}

template <class T>
Matrix<T> LstmLayer<T>::backward(const Cache& cache, const Matrix<T>& dh_out, Eigen::Index batch) {
  const Eigen::Index hs = hidden_size();
  const Eigen::Index rows = dh_out.rows();
  const Eigen::Index steps = rows / batch;
  Matrix<T> dgates(rows, 4 * hs);
  Matrix<T> dh_next = Matrix<T>::Zero(batch, hs);
  Matrix<T> dc_next = Matrix<T>::Zero(batch, hs);
  Matrix<T> dh(batch, hs);
  Matrix<T> dc(batch, hs);
  const Matrix<T> zeros = Matrix<T>::Zero(batch, hs);

  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const Eigen::Index r = t * batch;
    const auto g = cache.gates.middleRows(r, batch);
    const auto i = g.leftCols(hs).array();
    const auto f = g.middleCols(hs, hs).array();
    const auto cand = g.middleCols(2 * hs, hs).array();
    const auto o = g.rightCols(hs).array();
    const auto tc = cache.cell_tanh.middleRows(r, batch).array();

    dh = dh_out.middleRows(r, batch) + dh_next;
    dc = (dh.array() * o * (T(1) - tc.square()) + dc_next.array()).matrix();

    auto dg = dgates.middleRows(r, batch);
    if (t > 0) {
      const auto c_prev = cache.cells.middleRows(r - batch, batch).array();
      dg.middleCols(hs, hs) = (dc.array() * c_prev * f * (T(1) - f)).matrix();
    } else {
      dg.middleCols(hs, hs).setZero();
    }
    dg.leftCols(hs) = (dc.array() * cand * i * (T(1) - i)).matrix();
    dg.middleCols(2 * hs, hs) = (dc.array() * i * (T(1) - cand.square())).matrix();
    dg.rightCols(hs) = (dh.array() * tc * o * (T(1) - o)).matrix();

    dc_next = (dc.array() * f).matrix();
    dh_next.noalias() = dg * recurrent_weight_.value().transpose();
  }

  if (input_weight_.trainable()) input_weight_.grad().noalias() += cache.input.transpose() * dgates;
  if (bias_.trainable()) bias_.grad().row(0) += dgates.colwise().sum();
  if (recurrent_weight_.trainable() && steps > 1) {
    recurrent_weight_.grad().noalias() +=
        cache.hidden.topRows(rows - batch).transpose() * dgates.bottomRows(rows - batch);
  }
  return dgates * input_weight_.value().transpose();
}

template <class T>
void LstmLayer<T>::collect(ParameterRefs<T>& out) {
  out.push_back(&input_weight_);
  out.push_back(&recurrent_weight_);
  out.push_back(&bias_);
}

template <class T>
void LstmLayer<T>::collect(std::vector<const Parameter<T>*>& out) const {
  out.push_back(&input_weight_);
  out.push_back(&recurrent_weight_);
  out.push_back(&bias_);
}

template <class T>
LstmStack<T>::LstmStack(const std::string& name, Eigen::Index input_size, Eigen::Index hidden_size,
                        int layers) {
  if (layers < 1) throw Error(ErrorCode::kInvalidArgument, "LSTM stack needs at least one layer");
  for (int l = 0; l < layers; ++l) {
    layers_.emplace_back(name + ".layer" + std::to_string(l), l == 0 ? input_size : hidden_size, hidden_size);
  }
}

template <class T>
void LstmStack<T>::init(Rng& rng) {
  for (auto& l : layers_) l.init(rng);
}

template <class T>
Matrix<T> LstmStack<T>::forward(const Matrix<T>& x, Eigen::Index batch) const {
  Matrix<T> h = layers_.front().forward(x, batch);
  for (std::size_t l = 1; l < layers_.size(); ++l) h = layers_[l].forward(h, batch);
  return h;
}

template <class T>
Matrix<T> LstmStack<T>::forward(const Matrix<T>& x, Eigen::Index batch, Cache& cache) const {
  cache.layers.resize(layers_.size());
  Matrix<T> h = layers_.front().forward(x, batch, cache.layers.front());
  for (std::size_t l = 1; l < layers_.size(); ++l) h = layers_[l].forward(h, batch, cache.layers[l]);
  return h;
}

template <class T>
Matrix<T> LstmStack<T>::backward(const Cache& cache, const Matrix<T>& dh, Eigen::Index batch) {
  Matrix<T> d = dh;
  for (std::size_t l = layers_.size(); l-- > 0;) d = layers_[l].backward(cache.layers[l], d, batch);
  return d;
}

template <class T>
void LstmStack<T>::collect(ParameterRefs<T>& out) {
  for (auto& l : layers_) l.collect(out);
}

template <class T>
void LstmStack<T>::collect(std::vector<const Parameter<T>*>& out) const {
  for (const auto& l : layers_) l.collect(out);
}

template class LstmLayer<float>;
template class LstmLayer<double>;
template class LstmStack<float>;
template class LstmStack<double>;

}  // namespace kinesis::nn

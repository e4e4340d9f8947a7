// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/nn/attention.hpp"

#include <cmath>

namespace kinesis::nn {

template <class T>
Matrix<T> softmax_rows(const Matrix<T>& logits) {
  Matrix<T> p = logits.colwise() - logits.rowwise().maxCoeff();
  p = p.array().exp();
  p = p.array().colwise() / p.rowwise().sum().array();
  return p;
}

template <class T>
SelfAttention<T>::SelfAttention(const std::string& name, Eigen::Index width, int heads)
    : query_(name + ".query", width, width),
      key_(name + ".key", width, width),
      value_(name + ".value", width, width),
      output_(name + ".output", width, width),
      heads_(heads) {
  if (heads < 1 || width % heads != 0) {
    throw Error(ErrorCode::kInvalidArgument, "attention width must divide evenly into heads");
  }
}

template <class T>
void SelfAttention<T>::init(Rng& rng) {
  query_.init(rng);
  key_.init(rng);
  value_.init(rng);
  output_.init(rng);
}

template <class T>
Matrix<T> SelfAttention<T>::attend(const Matrix<T>& q, const Matrix<T>& k, const Matrix<T>& v,
                                   std::vector<Matrix<T>>* probs) const {
  const Eigen::Index head_dim = q.cols() / heads_;
  const T scale = T(1) / std::sqrt(static_cast<T>(head_dim));
  Matrix<T> out(q.rows(), q.cols());
  if (probs) probs->resize(static_cast<std::size_t>(heads_));
  for (int h = 0; h < heads_; ++h) {
    const Eigen::Index c0 = h * head_dim;
    Matrix<T> scores = scale * (q.middleCols(c0, head_dim) * k.middleCols(c0, head_dim).transpose());
    Matrix<T> p = softmax_rows(scores);
    out.middleCols(c0, head_dim).noalias() = p * v.middleCols(c0, head_dim);
    if (probs) (*probs)[static_cast<std::size_t>(h)] = std::move(p);
  }
  return out;
}

template <class T>
Matrix<T> SelfAttention<T>::forward(const Matrix<T>& x) const {
  return output_.forward(attend(query_.forward(x), key_.forward(x), value_.forward(x), nullptr));
}

template <class T>
Matrix<T> SelfAttention<T>::forward(const Matrix<T>& x, Cache& cache) const {
  cache.queries = query_.forward(x, cache.q);
  cache.keys = key_.forward(x, cache.k);
  cache.values = value_.forward(x, cache.v);
  Matrix<T> mixed = attend(cache.queries, cache.keys, cache.values, &cache.probs);
  return output_.forward(mixed, cache.out);
}

template <class T>
Matrix<T> SelfAttention<T>::backward(const Cache& cache, const Matrix<T>& dy) {
  const Matrix<T> dmixed = output_.backward(cache.out, dy);
  const Eigen::Index head_dim = dmixed.cols() / heads_;
  const T scale = T(1) / std::sqrt(static_cast<T>(head_dim));
  Matrix<T> dq(dmixed.rows(), dmixed.cols());
  Matrix<T> dk(dmixed.rows(), dmixed.cols());
  Matrix<T> dv(dmixed.rows(), dmixed.cols());
  for (int h = 0; h < heads_; ++h) {
    const Eigen::Index c0 = h * head_dim;
    const Matrix<T>& p = cache.probs[static_cast<std::size_t>(h)];
    const auto dout = dmixed.middleCols(c0, head_dim);
    dv.middleCols(c0, head_dim).noalias() = p.transpose() * dout;
    Matrix<T> dp = dout * cache.values.middleCols(c0, head_dim).transpose();
    Matrix<T> ds = p.cwiseProduct(dp);
    ds = ds - p.cwiseProduct(ds.rowwise().sum().replicate(1, ds.cols()));
    dq.middleCols(c0, head_dim).noalias() = scale * (ds * cache.keys.middleCols(c0, head_dim));
    dk.middleCols(c0, head_dim).noalias() = scale * (ds.transpose() * cache.queries.middleCols(c0, head_dim));
  }
  Matrix<T> dx = query_.backward(cache.q, dq);
  dx += key_.backward(cache.k, dk);
  dx += value_.backward(cache.v, dv);
  return dx;
}

template <class T>
void SelfAttention<T>::collect(ParameterRefs<T>& out) {
  query_.collect(out);
  key_.collect(out);
  value_.collect(out);
  output_.collect(out);
}

template <class T>
void SelfAttention<T>::collect(std::vector<const Parameter<T>*>& out) const {
  query_.collect(out);
  key_.collect(out);
  value_.collect(out);
  output_.collect(out);
}

template <class T>
void SelfAttention<T>::set_frozen(bool frozen) {
  query_.set_frozen(frozen);
  key_.set_frozen(frozen);
  value_.set_frozen(frozen);
  output_.set_frozen(frozen);
}

template <class T>
TransformerBlock<T>::TransformerBlock(const std::string& name, Eigen::Index width, int heads,
                                      Eigen::Index ffn_width)
    : ln1_(name + ".ln1", width),
      ln2_(name + ".ln2", width),
      attn_(name + ".attn", width, heads),
      fc1_(name + ".fc1", width, ffn_width),
      fc2_(name + ".fc2", ffn_width, width) {}

template <class T>
void TransformerBlock<T>::init(Rng& rng) {
  attn_.init(rng);
  fc1_.init(rng);
  fc2_.init(rng);
}

template <class T>
Matrix<T> TransformerBlock<T>::forward(const Matrix<T>& x) const {
  Matrix<T> x1 = x + attn_.forward(ln1_.forward(x));
  return x1 + fc2_.forward(gelu(fc1_.forward(ln2_.forward(x1))));
}

template <class T>
Matrix<T> TransformerBlock<T>::forward(const Matrix<T>& x, Cache& cache) const {
  Matrix<T> x1 = x + attn_.forward(ln1_.forward(x, cache.ln1), cache.attn);
  cache.hidden = fc1_.forward(ln2_.forward(x1, cache.ln2), cache.fc1);
  return x1 + fc2_.forward(gelu(cache.hidden), cache.fc2);
}

template <class T>
Matrix<T> TransformerBlock<T>::backward(const Cache& cache, const Matrix<T>& dy) {
  Matrix<T> dact = fc2_.backward(cache.fc2, dy);
  Matrix<T> dx1 = dy + ln2_.backward(cache.ln2, fc1_.backward(cache.fc1, gelu_backward(cache.hidden, dact)));
  return dx1 + ln1_.backward(cache.ln1, attn_.backward(cache.attn, dx1));
}

template <class T>
void TransformerBlock<T>::collect(ParameterRefs<T>& out) {
  ln1_.collect(out);
  attn_.collect(out);
  ln2_.collect(out);
  fc1_.collect(out);
  fc2_.collect(out);
}

template <class T>
void TransformerBlock<T>::collect(std::vector<const Parameter<T>*>& out) const {
  ln1_.collect(out);
  attn_.collect(out);
  ln2_.collect(out);
  fc1_.collect(out);
  fc2_.collect(out);
}

template <class T>
void TransformerBlock<T>::set_frozen(bool frozen) {
  ln1_.set_frozen(frozen);
  attn_.set_frozen(frozen);
  ln2_.set_frozen(frozen);
  fc1_.set_frozen(frozen);
  fc2_.set_frozen(frozen);
}

template Matrix<float> softmax_rows<float>(const Matrix<float>&);
template Matrix<double> softmax_rows<double>(const Matrix<double>&);
template class SelfAttention<float>;
template class SelfAttention<double>;
template class TransformerBlock<float>;
template class TransformerBlock<double>;

}  // namespace kinesis::nn

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/nn/layers.hpp"

#include <cmath>
#include <cstring>
#include <span>

#include "kinesis/common/hash.hpp"

namespace kinesis::nn {

template <class T>
std::string parameters_hash(const std::vector<const Parameter<T>*>& params) {
  Sha256 sha;
  for (const auto* p : params) {
    sha.update(p->name());
    const std::int64_t shape[2] = {p->rows(), p->cols()};
    sha.update(std::as_bytes(std::span<const std::int64_t>(shape, 2)));
    sha.update(std::as_bytes(std::span<const T>(p->value().data(), static_cast<std::size_t>(p->size()))));
  }
  return sha.hex_digest();
}

// ---- Linear ---------------------------------------------------------------

template <class T>
Linear<T>::Linear(std::string name, Eigen::Index in_features, Eigen::Index out_features, bool bias)
    : name_(std::move(name)),
      weight_(name_ + ".weight", Matrix<T>::Zero(in_features, out_features)) {
  if (bias) bias_.emplace(name_ + ".bias", Matrix<T>::Zero(1, out_features));
}

template <class T>
void Linear<T>::init(Rng& rng) {
  fill_uniform(weight_.mutable_value(), 1.0 / std::sqrt(static_cast<double>(in_features())), rng);
  if (bias_) bias_->mutable_value().setZero();
}

template <class T>
Matrix<T> Linear<T>::forward(const Matrix<T>& x) const {
  Matrix<T> y = x * weight_.value();
  if (bias_) y.rowwise() += bias_->value().row(0);
  if (lora_) y.noalias() += lora_->scale * ((x * lora_->down.value()) * lora_->up.value());
  return y;
}

template <class T>
Matrix<T> Linear<T>::forward(const Matrix<T>& x, Cache& cache) const {
  cache.x = x;
  Matrix<T> y = x * weight_.value();
  if (bias_) y.rowwise() += bias_->value().row(0);
  if (lora_) {
    cache.lora_hidden = x * lora_->down.value();
    y.noalias() += lora_->scale * (cache.lora_hidden * lora_->up.value());
  }
  return y;
}

template <class T>
Matrix<T> Linear<T>::backward(const Cache& cache, const Matrix<T>& dy) {
  if (weight_.trainable()) weight_.grad().noalias() += cache.x.transpose() * dy;
  if (bias_ && bias_->trainable()) bias_->grad().row(0) += dy.colwise().sum();
  Matrix<T> dx = dy * weight_.value().transpose();
  if (lora_) {
    if (lora_->up.trainable()) lora_->up.grad().noalias() += lora_->scale * (cache.lora_hidden.transpose() * dy);
    Matrix<T> dh = lora_->scale * (dy * lora_->up.value().transpose());
    if (lora_->down.trainable()) lora_->down.grad().noalias() += cache.x.transpose() * dh;
    dx.noalias() += dh * lora_->down.value().transpose();
  }
  return dx;
}

template <class T>
void Linear<T>::attach_lora(int rank, double alpha, Rng& rng) {
  const auto max_rank = std::min(in_features(), out_features());
  if (rank < 1 || rank > max_rank) {
    throw Error(ErrorCode::kRankTooLarge,
                "rank " + std::to_string(rank) + " invalid for " + name_ + " (max " + std::to_string(max_rank) + ")",
                name_);
  }
  Matrix<T> down(in_features(), rank);
  fill_uniform(down, 1.0 / std::sqrt(static_cast<double>(in_features())), rng);
  lora_.emplace(Lora{Parameter<T>(name_ + ".lora_down", std::move(down)),
                     Parameter<T>(name_ + ".lora_up", Matrix<T>::Zero(rank, out_features())),
                     static_cast<T>(alpha / rank)});
}

template <class T>
void Linear<T>::set_lora(Matrix<T> down, Matrix<T> up, T scale) {
  if (down.rows() != in_features() || up.cols() != out_features() || down.cols() != up.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "adapter shape mismatch for " + name_, name_);
  }
  lora_.emplace(Lora{Parameter<T>(name_ + ".lora_down", std::move(down)),
                     Parameter<T>(name_ + ".lora_up", std::move(up)), scale});
}

template <class T>
void Linear<T>::merge_lora() {
  if (!lora_) throw Error(ErrorCode::kNoAdapters, name_ + " has no adapter to merge", name_);
  const bool was_frozen = weight_.frozen();
  weight_.set_frozen(false);
  weight_.mutable_value().noalias() += lora_->scale * (lora_->down.value() * lora_->up.value());
  weight_.set_frozen(was_frozen);
  lora_.reset();
}

template <class T>
void Linear<T>::collect(ParameterRefs<T>& out) {
  out.push_back(&weight_);
  if (bias_) out.push_back(&*bias_);
  if (lora_) {
    out.push_back(&lora_->down);
    out.push_back(&lora_->up);
  }
}

template <class T>
void Linear<T>::collect(std::vector<const Parameter<T>*>& out) const {
  out.push_back(&weight_);
  if (bias_) out.push_back(&*bias_);
  if (lora_) {
    out.push_back(&lora_->down);
    out.push_back(&lora_->up);
  }
}

template <class T>
void Linear<T>::set_frozen(bool frozen) {
  weight_.set_frozen(frozen);
  if (bias_) bias_->set_frozen(frozen);
}

// ---- LayerNorm ------------------------------------------------------------

template <class T>
LayerNorm<T>::LayerNorm(std::string name, Eigen::Index width, T eps)
    : gain_(name + ".gain", Matrix<T>::Ones(1, width)),
      shift_(name + ".shift", Matrix<T>::Zero(1, width)),
      eps_(eps) {}

template <class T>
Matrix<T> LayerNorm<T>::forward(const Matrix<T>& x) const {
  Cache cache;
  return forward(x, cache);
}

template <class T>
Matrix<T> LayerNorm<T>::forward(const Matrix<T>& x, Cache& cache) const {
  const auto n = static_cast<T>(x.cols());
  auto mean = (x.rowwise().sum() / n).eval();
  cache.xhat = x.colwise() - mean;
  auto var = (cache.xhat.array().square().rowwise().sum() / n).eval();
  cache.rstd = (var + eps_).rsqrt().matrix();
  cache.xhat = cache.xhat.array().colwise() * cache.rstd.array();
  Matrix<T> y = cache.xhat.array().rowwise() * gain_.value().row(0).array();
  y.rowwise() += shift_.value().row(0);
  return y;
}

template <class T>
Matrix<T> LayerNorm<T>::backward(const Cache& cache, const Matrix<T>& dy) {
  if (gain_.trainable()) gain_.grad().row(0) += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  if (shift_.trainable()) shift_.grad().row(0) += dy.colwise().sum();
  const auto n = static_cast<T>(dy.cols());
  Matrix<T> dxhat = dy.array().rowwise() * gain_.value().row(0).array();
  auto mean_d = (dxhat.rowwise().sum() / n).eval();
  auto mean_dx = ((dxhat.array() * cache.xhat.array()).rowwise().sum() / n).eval();
  Matrix<T> dx = (dxhat.colwise() - mean_d).array() - cache.xhat.array().colwise() * mean_dx.array();
  dx = dx.array().colwise() * cache.rstd.array();
  return dx;
}

template <class T>
void LayerNorm<T>::collect(ParameterRefs<T>& out) {
  out.push_back(&gain_);
  out.push_back(&shift_);
}

template <class T>
void LayerNorm<T>::collect(std::vector<const Parameter<T>*>& out) const {
  out.push_back(&gain_);
  out.push_back(&shift_);
}

template <class T>
void LayerNorm<T>::set_frozen(bool frozen) {
  gain_.set_frozen(frozen);
  shift_.set_frozen(frozen);
}

// ---- GELU -----------------------------------------------------------------

namespace {
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;
}  // namespace

template <class T>
Matrix<T> gelu(const Matrix<T>& x) {
  const T c = static_cast<T>(kGeluC);
  const T a = static_cast<T>(kGeluA);
  return x.unaryExpr([c, a](T v) { return T(0.5) * v * (T(1) + std::tanh(c * (v + a * v * v * v))); });
}

template <class T>
Matrix<T> gelu_backward(const Matrix<T>& x, const Matrix<T>& dy) {
  const T c = static_cast<T>(kGeluC);
  const T a = static_cast<T>(kGeluA);
  Matrix<T> d = x.unaryExpr([c, a](T v) {
    const T t = std::tanh(c * (v + a * v * v * v));
    return T(0.5) * (T(1) + t) + T(0.5) * v * (T(1) - t * t) * c * (T(1) + T(3) * a * v * v);
  });
  return d.cwiseProduct(dy);
}

#define KINESIS_INSTANTIATE(T)                                                          \
  template std::string parameters_hash<T>(const std::vector<const Parameter<T>*>&); \
  template class Linear<T>;                                                          \
  template class LayerNorm<T>;                                                       \
  template Matrix<T> gelu<T>(const Matrix<T>&);                                      \
  template Matrix<T> gelu_backward<T>(const Matrix<T>&, const Matrix<T>&);

KINESIS_INSTANTIATE(float)
KINESIS_INSTANTIATE(double)
#undef KINESIS_INSTANTIATE

}  // namespace kinesis::nn

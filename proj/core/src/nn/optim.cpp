// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/nn/optim.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace kinesis::nn {

void to_json(nlohmann::json& j, const AdamConfig& cfg) {
  j = nlohmann::json{{"learning_rate", cfg.learning_rate}, {"beta1", cfg.beta1},
                     {"beta2", cfg.beta2},                 {"epsilon", cfg.epsilon},
                     {"weight_decay", cfg.weight_decay},   {"clip_norm", cfg.clip_norm}};
}

void from_json(const nlohmann::json& j, AdamConfig& cfg) {
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.beta1 = j.value("beta1", cfg.beta1);
  cfg.beta2 = j.value("beta2", cfg.beta2);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
  cfg.clip_norm = j.value("clip_norm", cfg.clip_norm);
}

template <class T>
Adam<T>::Adam(ParameterRefs<T> params, AdamConfig cfg) : cfg_(cfg) {
  for (auto* p : params) {
    if (p->trainable()) params_.push_back(p);
  }
}

template <class T>
void Adam<T>::zero_grad() {
  for (auto* p : params_) p->zero_grad();
}

template <class T>
double Adam<T>::step(double grad_scale) {
  double sq = 0.0;
  for (auto* p : params_) sq += static_cast<double>(p->grad().squaredNorm());
  const double norm = std::sqrt(sq) * grad_scale;
  double scale = grad_scale;
  if (cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm) scale *= cfg_.clip_norm / norm;

  ++step_count_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
  const T lr = static_cast<T>(cfg_.learning_rate);
  const T b1 = static_cast<T>(cfg_.beta1);
  const T b2 = static_cast<T>(cfg_.beta2);
  const T step_size = static_cast<T>(cfg_.learning_rate / bc1);
  const T inv_bc2 = static_cast<T>(1.0 / bc2);
  const T eps = static_cast<T>(cfg_.epsilon);
  for (auto* p : params_) {
    auto& st = state_[p];
    if (st.m.size() == 0) {
      st.m = Matrix<T>::Zero(p->rows(), p->cols());
      st.v = Matrix<T>::Zero(p->rows(), p->cols());
    }
    auto& g = p->grad();
    g *= static_cast<T>(scale);
    st.m = b1 * st.m + (T(1) - b1) * g;
    st.v = b2 * st.v + (T(1) - b2) * g.cwiseProduct(g);
    auto& w = p->mutable_value();
    if (cfg_.weight_decay > 0.0) w *= T(1) - lr * static_cast<T>(cfg_.weight_decay);
    w.array() -= step_size * st.m.array() / ((st.v.array() * inv_bc2).sqrt() + eps);
    g.setZero();
  }
  return norm;
}

template class Adam<float>;
template class Adam<double>;

}  // namespace kinesis::nn

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <unordered_map>

#include <nlohmann/json_fwd.hpp>

#include "kinesis/nn/parameter.hpp"

namespace kinesis::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // decoupled (AdamW style)
  double clip_norm = 1.0;     // global gradient norm cap; <= 0 disables
};

void to_json(nlohmann::json& j, const AdamConfig& cfg);
void from_json(const nlohmann::json& j, AdamConfig& cfg);

/// Adam over the trainable members of a parameter list. Frozen parameters are
/// skipped entirely, so their values are never touched.
template <class T>
class Adam {
 public:
  Adam(ParameterRefs<T> params, AdamConfig cfg);

  void zero_grad();
  /// Applies one update using the accumulated gradients scaled by
  /// `grad_scale`, then clears them. Returns the pre-clip gradient norm.
  double step(double grad_scale = 1.0);
  void set_learning_rate(double lr) { cfg_.learning_rate = lr; }
  double learning_rate() const { return cfg_.learning_rate; }

 private:
  struct Moments {
    Matrix<T> m;
    Matrix<T> v;
  };
  ParameterRefs<T> params_;
  AdamConfig cfg_;
  std::unordered_map<const Parameter<T>*, Moments> state_;
  long step_count_ = 0;
};

}  // namespace kinesis::nn

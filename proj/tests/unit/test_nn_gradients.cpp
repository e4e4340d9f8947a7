// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "grad_check.hpp"
#include "kinesis/nn/attention.hpp"
#include "kinesis/nn/layers.hpp"
#include "kinesis/nn/lstm.hpp"

namespace kinesis::nn {
namespace {

using testing::expect_gradients;
using testing::MatD;

MatD random(Eigen::Index r, Eigen::Index c, Rng& rng) {
  MatD m(r, c);
  fill_normal(m, 1.0, rng);
  return m;
}

TEST(Gradients, Linear) {
  Rng rng(1);
  Linear<double> lin("lin", 5, 3);
  lin.init(rng);
  fill_normal(lin.bias().mutable_value(), 0.5, rng);
  ParameterRefs<double> params;
  lin.collect(params);
  expect_gradients([&](const MatD& x) { return lin.forward(x); },
                   [&](const MatD& x, const MatD& dy) {
                     Linear<double>::Cache c;
                     lin.forward(x, c);
                     return lin.backward(c, dy);
                   },
                   params, random(4, 5, rng), random(4, 3, rng));
}

TEST(Gradients, LinearWithAdapterOnlyTrainsAdapter) {
  Rng rng(2);
  Linear<double> lin("lin", 6, 4);
  lin.init(rng);
  lin.attach_lora(2, 4.0, rng);
  fill_normal(lin.lora_up().mutable_value(), 0.3, rng);
  lin.set_frozen(true);
  ParameterRefs<double> params;
  lin.collect(params);
  expect_gradients([&](const MatD& x) { return lin.forward(x); },
                   [&](const MatD& x, const MatD& dy) {
                     Linear<double>::Cache c;
                     lin.forward(x, c);
                     return lin.backward(c, dy);
                   },
                   params, random(3, 6, rng), random(3, 4, rng));
  EXPECT_EQ(lin.weight().frozen(), true);
  EXPECT_EQ(lin.lora_down().frozen(), false);
}

TEST(Gradients, LayerNorm) {
  Rng rng(3);
  LayerNorm<double> ln("ln", 7);
  fill_normal(ln.gain().mutable_value(), 1.0, rng);
  fill_normal(ln.shift().mutable_value(), 1.0, rng);
  ParameterRefs<double> params;
  ln.collect(params);
  expect_gradients([&](const MatD& x) { return ln.forward(x); },
                   [&](const MatD& x, const MatD& dy) {
                     LayerNorm<double>::Cache c;
                     ln.forward(x, c);
                     return ln.backward(c, dy);
                   },
                   params, random(3, 7, rng), random(3, 7, rng));
}

TEST(Gradients, SelfAttention) {
  Rng rng(4);
  SelfAttention<double> attn("attn", 8, 2);
  attn.init(rng);
  ParameterRefs<double> params;
  attn.collect(params);
  expect_gradients([&](const MatD& x) { return attn.forward(x); },
                   [&](const MatD& x, const MatD& dy) {
                     SelfAttention<double>::Cache c;
                     attn.forward(x, c);
                     return attn.backward(c, dy);
                   },
                   params, random(5, 8, rng), random(5, 8, rng));
}

TEST(Gradients, TransformerBlock) {
  Rng rng(5);
  TransformerBlock<double> block("blk", 8, 2, 12);
  block.init(rng);
  ParameterRefs<double> params;
  block.collect(params);
  expect_gradients([&](const MatD& x) { return block.forward(x); },
                   [&](const MatD& x, const MatD& dy) {
                     TransformerBlock<double>::Cache c;
                     block.forward(x, c);
                     return block.backward(c, dy);
                   },
                   params, random(4, 8, rng), random(4, 8, rng));
}

TEST(Gradients, LstmStackThroughTime) {
  Rng rng(6);
  const Eigen::Index batch = 2, steps = 5;
  LstmStack<double> lstm("lstm", 3, 4, 2);
  lstm.init(rng);
  ParameterRefs<double> params;
  lstm.collect(params);
  expect_gradients([&](const MatD& x) { return lstm.forward(x, batch); },
                   [&](const MatD& x, const MatD& dy) {
                     LstmStack<double>::Cache c;
                     lstm.forward(x, batch, c);
                     return lstm.backward(c, dy, batch);
                   },
                   params, random(steps * batch, 3, rng), random(steps * batch, 4, rng));
}

TEST(Gradients, LstmBatchRowsAreIndependent) {
  Rng rng(7);
  LstmLayer<double> lstm("l", 3, 4);
  lstm.init(rng);
  const MatD x = random(6 * 2, 3, rng);
  const MatD both = lstm.forward(x, 2);
  MatD first(6, 3);
  for (Eigen::Index t = 0; t < 6; ++t) first.row(t) = x.row(t * 2);
  const MatD alone = lstm.forward(first, 1);
  for (Eigen::Index t = 0; t < 6; ++t) EXPECT_TRUE(alone.row(t).isApprox(both.row(t * 2), 1e-12));
}

}  // namespace
}  // namespace kinesis::nn

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "kinesis/quality/scorer.hpp"
#include "kinesis/recog/encoder.hpp"
#include "kinesis/recog/labels.hpp"
#include "kinesis/recog/text_provider.hpp"
#include "kinesis/synth/waveform.hpp"

namespace {

using namespace kinesis;

void BM_EncoderEmbed(benchmark::State& state) {
  const recog::SignalEncoder encoder(recog::EncoderArch{}, 7);
  Rng rng(2);
  const auto frames = synth::render(synth::signature_for("dribbling"), static_cast<std::size_t>(state.range(0)),
                                    signal::kCanonicalRateHz, 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(encoder.embed(frames));
}
BENCHMARK(BM_EncoderEmbed)->Arg(200)->Arg(600)->Arg(1500)->Unit(benchmark::kMillisecond);

void BM_EncoderEmbedLora(benchmark::State& state) {
  recog::SignalEncoder encoder(recog::EncoderArch{}, 7);
  encoder.inject_lora(recog::LoraConfig{});
  Rng rng(2);
  const auto frames = synth::render(synth::signature_for("dribbling"), 600, signal::kCanonicalRateHz, 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(encoder.embed(frames));
}
BENCHMARK(BM_EncoderEmbedLora)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const auto provider = recog::TextEmbeddingProvider::seeded(42);
  const recog::LabelSet labels(synth::pe_class_labels());
  const Eigen::MatrixXd matrix = provider.embed_labels(labels);
  const Eigen::VectorXd f = Eigen::VectorXd::Random(static_cast<Eigen::Index>(provider.dim()));
  for (auto _ : state) benchmark::DoNotOptimize(recog::classify(f, matrix, labels));
}
BENCHMARK(BM_Classify);

void BM_ScoreSegment(benchmark::State& state) {
  const quality::Scorer scorer(quality::ScorerArch{}, 3);
  const Eigen::VectorXd a = Eigen::VectorXd::Random(512), b = Eigen::VectorXd::Random(512);
  for (auto _ : state) benchmark::DoNotOptimize(quality::score_segment(scorer, a, b));
}
BENCHMARK(BM_ScoreSegment);

}  // namespace

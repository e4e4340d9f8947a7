// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "kinesis/motion/detector.hpp"
#include "kinesis/motion/segments.hpp"
#include "kinesis/synth/waveform.hpp"

namespace {

using namespace kinesis;

signal::SignalSequence walking(std::size_t frames) {
  Rng rng(1);
  return signal::SignalSequence::from_frames(
      signal::kCanonicalRateHz, synth::render(synth::signature_for("walking"), frames, signal::kCanonicalRateHz, 1.0, rng));
}

// Full sliding-window inference; the step divisor is the range argument.
void BM_Detect(benchmark::State& state) {
  const motion::Detector model(motion::DetectorArch{}, 3);
  const auto seq = walking(3000);
  const auto window = signal::WindowConfig::with_overlap(300, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(motion::detect(model, seq, window));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(seq.size()));
}
BENCHMARK(BM_Detect)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_WindowAveraging(benchmark::State& state) {
  const auto seq = walking(static_cast<std::size_t>(state.range(0)));
  const signal::WindowConfig window{300, 75};
  const motion::WindowPredictor constant = [](const std::vector<signal::Frames>& w) {
    return std::vector<std::vector<double>>(w.size(), std::vector<double>(300, 0.5));
  };
  for (auto _ : state) benchmark::DoNotOptimize(motion::average_window_predictions(seq.frames(), window, constant));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WindowAveraging)->Arg(3000)->Arg(30000);

void BM_ExtractSegments(benchmark::State& state) {
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> probs(static_cast<std::size_t>(state.range(0)));
  for (auto& p : probs) p = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(motion::extract_segments(probs, {}));
}
BENCHMARK(BM_ExtractSegments)->Arg(30000);

}  // namespace

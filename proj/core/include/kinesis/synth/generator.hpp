// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinesis/common/rng.hpp"
#include "kinesis/signal/sequence.hpp"
#include "kinesis/synth/pool.hpp"

namespace kinesis::synth {

/// Knobs for concatenating pool clips into motion-detection training data.
struct SynthConfig {
  std::size_t min_segments = 2;
  std::size_t max_segments = 8;
  std::size_t blend_width = 10;
  std::size_t min_length = 150;   // 3 s at 50 Hz
  std::size_t max_length = 3000;  // 60 s at 50 Hz
  double motion_probability = 0.5;
  std::uint64_t seed = 0;

  /// Shortest part a sequence is split into; leaves room for both blends.
  std::size_t min_part_length() const { return blend_width + 2; }

  /// Throws kInvalidArgument naming the bad field.
  void validate() const;
};

void to_json(nlohmann::json& j, const SynthConfig& cfg);
void from_json(const nlohmann::json& j, SynthConfig& cfg);

/// Per-frame motion labels, 1 = motion.
using MotionMask = std::vector<std::uint8_t>;

/// One part of a synthesized sequence as drawn from the pool.
struct SegmentDraw {
  bool motion = false;
  std::size_t segment_index = 0;  // within the drawn class
  std::size_t offset = 0;         // first frame taken (clips shorter than the part are tiled from 0)
  std::size_t length = 0;
  std::string source_label;
};

struct SynthSample {
  signal::SignalSequence signal;
  MotionMask mask;
  std::vector<SegmentDraw> draws;
};

/// Linear bridge of `width` frames from the last row of `tail` to the first
/// row of `head`; frame k (1-based) is tail_last*(1-k/(w+1)) + head_first*k/(w+1).
signal::Frames blend_transition(const signal::Frames& tail, const signal::Frames& head, std::size_t width);

/// Frames taken by a blend on each side of a junction: extra frame goes to the earlier part.
inline std::size_t blend_before(std::size_t width) { return (width + 1) / 2; }
inline std::size_t blend_after(std::size_t width) { return width / 2; }

/// Overwrites the `width` frames straddling each junction (row index where a
/// new part starts) with a blend between the nearest untouched neighbours.
void blend_junctions(signal::Frames& frames, const std::vector<std::size_t>& junctions, std::size_t width);

/// Mask for parts of the given lengths and classes, with blended frames
/// given the later part's class.
MotionMask replay_mask(const std::vector<SegmentDraw>& draws, std::size_t blend_width);

/// Takes `length` frames of `clip` starting at `offset`, tiling when short.
signal::Frames take_frames(const signal::Frames& clip, std::size_t offset, std::size_t length);

/// Expects a pool holding `motion` and/or `stationary` classes.
SynthSample synthesize_sequence(const LabeledSegmentPool& binary_pool, const SynthConfig& cfg, Rng& rng);

struct DatasetSummary {
  std::size_t sequences = 0;
  std::size_t frames = 0;
  std::size_t motion_frames = 0;
  double motion_fraction = 0.0;
  double length_bin_s = 5.0;
  std::vector<std::size_t> length_histogram;
};

void to_json(nlohmann::json& j, const DatasetSummary& s);

struct MotionDataset {
  std::vector<signal::SignalSequence> signals;
  std::vector<MotionMask> masks;
  SynthConfig config;
  DatasetSummary summary;
};

DatasetSummary summarize(const std::vector<signal::SignalSequence>& signals, const std::vector<MotionMask>& masks);

/// Sequence i uses an rng seeded with derive_seed(cfg.seed, i).
MotionDataset synthesize_dataset(const LabeledSegmentPool& binary_pool, const SynthConfig& cfg, std::size_t n);

}  // namespace kinesis::synth

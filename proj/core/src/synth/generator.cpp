// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/synth/generator.hpp"

#include <algorithm>
#include <numeric>

#include "kinesis/common/error.hpp"

namespace kinesis::synth {

void SynthConfig::validate() const {
  if (min_segments < 1 || min_segments > max_segments) {
    throw Error(ErrorCode::kInvalidArgument, "segment count range is invalid", "segments");
  }
  if (min_length < 1 || min_length > max_length) {
    throw Error(ErrorCode::kInvalidArgument, "length range is invalid", "length");
  }
  if (min_length < min_part_length()) {
    throw Error(ErrorCode::kInvalidArgument, "blend width must be shorter than the shortest segment", "blend_width");
  }
  if (!(motion_probability >= 0.0 && motion_probability <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "motion probability outside [0, 1]", "motion_probability");
  }
}

void to_json(nlohmann::json& j, const SynthConfig& cfg) {
  j = {{"min_segments", cfg.min_segments}, {"max_segments", cfg.max_segments},
       {"blend_width", cfg.blend_width},   {"min_length", cfg.min_length},
       {"max_length", cfg.max_length},     {"motion_probability", cfg.motion_probability},
       {"seed", cfg.seed}};
}

void from_json(const nlohmann::json& j, SynthConfig& cfg) {
  SynthConfig d;
  cfg.min_segments = j.value("min_segments", d.min_segments);
  cfg.max_segments = j.value("max_segments", d.max_segments);
  cfg.blend_width = j.value("blend_width", d.blend_width);
  cfg.min_length = j.value("min_length", d.min_length);
  cfg.max_length = j.value("max_length", d.max_length);
  cfg.motion_probability = j.value("motion_probability", d.motion_probability);
  cfg.seed = j.value("seed", d.seed);
}

namespace {

signal::Frames bridge(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b,
                      std::size_t width) {
  signal::Frames out(static_cast<Eigen::Index>(width), signal::kChannels);
  const double denom = static_cast<double>(width + 1);
  for (std::size_t k = 1; k <= width; ++k) {
    const double f = static_cast<double>(k) / denom;
    out.row(static_cast<Eigen::Index>(k - 1)) = a * (1.0 - f) + b * f;
  }
  return out;
}

}  // namespace

signal::Frames blend_transition(const signal::Frames& tail, const signal::Frames& head, std::size_t width) {
  if (width < 1) throw Error(ErrorCode::kInvalidArgument, "blend width must be at least 1", "w");
  if (tail.rows() < static_cast<Eigen::Index>(width) || head.rows() < static_cast<Eigen::Index>(width)) {
    throw Error(ErrorCode::kInvalidArgument, "blend width exceeds segment length", "w");
  }
  return bridge(tail.row(tail.rows() - 1), head.row(0), width);
}

void blend_junctions(signal::Frames& frames, const std::vector<std::size_t>& junctions, std::size_t width) {
  if (width == 0) return;
  const std::size_t before = blend_before(width);
  const std::size_t after = blend_after(width);
  const auto n = static_cast<std::size_t>(frames.rows());
  // Anchors come from the unblended signal so junction order cannot matter.
  const signal::Frames source = frames;
  for (const std::size_t j : junctions) {
    if (j < before + 1 || j + after >= n) {
      throw Error(ErrorCode::kInvalidArgument, "junction too close to sequence edge for blending", "blend_width");
    }
    const auto anchor_a = static_cast<Eigen::Index>(j - before - 1);
    const auto anchor_b = static_cast<Eigen::Index>(j + after);
    frames.middleRows(static_cast<Eigen::Index>(j - before), static_cast<Eigen::Index>(width)) =
        bridge(source.row(anchor_a), source.row(anchor_b), width);
  }
}

MotionMask replay_mask(const std::vector<SegmentDraw>& draws, std::size_t blend_width) {
  MotionMask mask;
  for (const auto& d : draws) mask.insert(mask.end(), d.length, d.motion ? 1 : 0);
  if (blend_width == 0) return mask;
  std::size_t pos = 0;
  for (std::size_t i = 0; i + 1 < draws.size(); ++i) {
    pos += draws[i].length;
    const std::uint8_t later = draws[i + 1].motion ? 1 : 0;
    for (std::size_t f = pos - blend_before(blend_width); f < pos; ++f) mask[f] = later;
  }
  return mask;
}

signal::Frames take_frames(const signal::Frames& clip, std::size_t offset, std::size_t length) {
  const auto rows = static_cast<std::size_t>(clip.rows());
  if (rows == 0) throw Error(ErrorCode::kEmptyInput, "cannot take frames from an empty clip");
  signal::Frames out(static_cast<Eigen::Index>(length), signal::kChannels);
  if (offset + length <= rows) {
    out = clip.middleRows(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(length));
    return out;
  }
  for (std::size_t i = 0; i < length; ++i) {
    out.row(static_cast<Eigen::Index>(i)) = clip.row(static_cast<Eigen::Index>((offset + i) % rows));
  }
  return out;
}

namespace {

std::vector<std::size_t> split_length(std::size_t total, std::size_t parts, std::size_t min_part, Rng& rng) {
  std::uniform_real_distribution<double> u(0.25, 1.75);
  std::vector<double> weights(parts);
  for (auto& w : weights) w = u(rng);
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  const std::size_t spare = total - parts * min_part;
  std::vector<std::size_t> out(parts, min_part);
  std::size_t used = 0;
  for (std::size_t i = 0; i + 1 < parts; ++i) {
    const auto extra = static_cast<std::size_t>(static_cast<double>(spare) * weights[i] / sum);
    out[i] += extra;
    used += extra;
  }
  out.back() += spare - used;
  return out;
}

}  // namespace

SynthSample synthesize_sequence(const LabeledSegmentPool& binary_pool, const SynthConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t n_motion = binary_pool.count(kMotionClass);
  const std::size_t n_stationary = binary_pool.count(kStationaryClass);
  if (n_motion == 0 && n_stationary == 0) {
    throw Error(ErrorCode::kEmptyInput, "binary pool has neither motion nor stationary segments");
  }
  for (const auto& label : binary_pool.labels()) {
    if (label != kMotionClass && label != kStationaryClass) {
      throw Error(ErrorCode::kInvalidArgument, "pool is not binary", label);
    }
  }

  std::uniform_int_distribution<std::size_t> k_dist(cfg.min_segments, cfg.max_segments);
  std::uniform_int_distribution<std::size_t> len_dist(cfg.min_length, cfg.max_length);
  std::size_t k = k_dist(rng);
  const std::size_t total = len_dist(rng);
  k = std::max<std::size_t>(1, std::min(k, total / cfg.min_part_length()));
  const auto parts = split_length(total, k, cfg.min_part_length(), rng);

  std::bernoulli_distribution motion_coin(cfg.motion_probability);
  SynthSample out;
  signal::Frames frames(static_cast<Eigen::Index>(total), signal::kChannels);
  std::vector<std::size_t> junctions;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < k; ++i) {
    bool motion = motion_coin(rng);
    if (motion && n_motion == 0) motion = false;
    if (!motion && n_stationary == 0) motion = true;
    const auto& segs = binary_pool.segments(motion ? kMotionClass : kStationaryClass);
    std::uniform_int_distribution<std::size_t> pick(0, segs.size() - 1);
    SegmentDraw draw;
    draw.motion = motion;
    draw.segment_index = pick(rng);
    draw.length = parts[i];
    const auto& clip = segs[draw.segment_index];
    const auto clip_rows = static_cast<std::size_t>(clip.frames.rows());
    if (clip_rows > draw.length) {
      std::uniform_int_distribution<std::size_t> off(0, clip_rows - draw.length);
      draw.offset = off(rng);
    }
    draw.source_label = clip.source_label;
    frames.middleRows(static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(draw.length)) =
        take_frames(clip.frames, draw.offset, draw.length);
    if (i > 0) junctions.push_back(pos);
    pos += draw.length;
    out.draws.push_back(std::move(draw));
  }
  blend_junctions(frames, junctions, cfg.blend_width);
  out.mask = replay_mask(out.draws, cfg.blend_width);
  out.signal = signal::SignalSequence::from_frames(binary_pool.rate(), std::move(frames));
  return out;
}

DatasetSummary summarize(const std::vector<signal::SignalSequence>& signals, const std::vector<MotionMask>& masks) {
  DatasetSummary s;
  s.sequences = signals.size();
  for (std::size_t i = 0; i < signals.size(); ++i) {
    s.frames += signals[i].size();
    s.motion_frames += static_cast<std::size_t>(std::count(masks[i].begin(), masks[i].end(), 1));
    const double seconds = static_cast<double>(signals[i].size()) / signals[i].rate();
    const auto bin = static_cast<std::size_t>(seconds / s.length_bin_s);
    if (s.length_histogram.size() <= bin) s.length_histogram.resize(bin + 1, 0);
    ++s.length_histogram[bin];
  }
  s.motion_fraction = s.frames ? static_cast<double>(s.motion_frames) / static_cast<double>(s.frames) : 0.0;
  return s;
}

void to_json(nlohmann::json& j, const DatasetSummary& s) {
  j = {{"sequences", s.sequences},       {"frames", s.frames},
       {"motion_frames", s.motion_frames}, {"motion_fraction", s.motion_fraction},
       {"length_bin_s", s.length_bin_s},   {"length_histogram", s.length_histogram}};
}

MotionDataset synthesize_dataset(const LabeledSegmentPool& binary_pool, const SynthConfig& cfg, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "dataset size must be at least 1", "n");
  cfg.validate();
  MotionDataset ds;
  ds.config = cfg;
  ds.signals.reserve(n);
  ds.masks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(cfg.seed, i));
    auto sample = synthesize_sequence(binary_pool, cfg, rng);
    ds.signals.push_back(std::move(sample.signal));
    ds.masks.push_back(std::move(sample.mask));
  }
  ds.summary = summarize(ds.signals, ds.masks);
  return ds;
}

}  // namespace kinesis::synth

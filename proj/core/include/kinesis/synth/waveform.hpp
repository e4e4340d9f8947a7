// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kinesis/common/rng.hpp"
#include "kinesis/signal/sequence.hpp"

namespace kinesis::synth {

/// Amplitude/frequency fingerprint of one action class. Rendering adds
/// per-clip jitter so two clips of a label are never identical.
struct LabelSignature {
  std::string label;
  bool stationary = false;
  signal::Vec3 gravity_dir{0.0, 0.0, 1.0};
  double base_freq_hz = 1.0;
  std::array<double, signal::kChannels> amplitude{};
  std::array<double, signal::kChannels> harmonic{1, 1, 1, 1, 1, 1};
  std::array<double, signal::kChannels> phase{};
  signal::Vec3 gyro_bias{};
  double burst_period_s = 0.0;  // 0: continuous
  double burst_duty = 1.0;
  double chirp = 0.0;           // relative frequency sweep over the clip
  double noise_std = 0.05;
};

/// Built-in signature for known labels (case-insensitive), otherwise one
/// derived deterministically from the label text.
LabelSignature signature_for(const std::string& label);
bool has_builtin_signature(const std::string& label);

/// Labels with built-in signatures, grouped for convenience.
const std::vector<std::string>& kuhar_style_labels();
const std::vector<std::string>& kuhar_style_motion_labels();
const std::vector<std::string>& pretraining_labels();
const std::vector<std::string>& pe_class_labels();

/// Scales the oscillating part of a rendered action; maps a [0,5] quality
/// score to [0.4, 1.0].
double quality_amplitude(double score);

/// Renders `n` frames at `rate_hz`. `amplitude_scale` multiplies the
/// oscillation (not gravity or noise).
signal::Frames render(const LabelSignature& sig, std::size_t n, double rate_hz, double amplitude_scale, Rng& rng);

/// A rendered action clip with the amplitude and quality score behind it.
struct LabeledClip {
  signal::Frames frames;
  std::string label;
  double amplitude = 1.0;
  double score = 0.0;
};

struct ClipSetConfig {
  std::size_t per_label = 10;
  std::size_t min_frames = 100;
  std::size_t max_frames = 200;
  double min_amplitude = 0.4;
  double max_amplitude = 1.0;
  std::uint64_t seed = 0;
  double rate_hz = signal::kCanonicalRateHz;
};

/// `per_label` clips of every label, interleaved label by label so any prefix
/// stays balanced. Amplitude is uniform in [min_amplitude, max_amplitude].
std::vector<LabeledClip> make_labeled_clips(const std::vector<std::string>& labels, const ClipSetConfig& cfg);

/// Like make_labeled_clips, but each clip draws a quality score uniform in
/// [0, 5] and is rendered at quality_amplitude(score); the amplitude range
/// is ignored.
std::vector<LabeledClip> make_scored_clips(const std::vector<std::string>& labels, const ClipSetConfig& cfg);

}  // namespace kinesis::synth

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/synth/waveform.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include <Eigen/Geometry>

#include "kinesis/common/error.hpp"

namespace kinesis::synth {

namespace {

constexpr double kGravity = 9.81;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxPlacementTilt = 0.6;  // radians

Eigen::Matrix3d placement_rotation(double angle, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector3d axis(n(rng), n(rng), n(rng));
  if (axis.norm() < 1e-12) axis = Eigen::Vector3d::UnitZ();
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct Profile {
  const char* name;
  bool stationary;
  signal::Vec3 gravity;
  double freq;
  std::array<double, 6> amp;
  std::array<double, 6> harm;
  double burst_period;
  double burst_duty;
  double chirp;
  signal::Vec3 gyro_bias;
};

// clang-format off
const Profile kProfiles[] = {
  // stationary postures
  {"standing",               true,  {0.0, 0.0, 1.0},  0.3, {0.03, 0.03, 0.03, 0.02, 0.02, 0.02}, {1, 1, 1, 1, 1, 1}, 0, 1, 0, {}},
  {"sitting",                true,  {0.5, 0.0, 0.87}, 0.3, {0.03, 0.03, 0.03, 0.02, 0.02, 0.02}, {1, 1, 1, 1, 1, 1}, 0, 1, 0, {}},
  {"laying",                 true,  {1.0, 0.0, 0.05}, 0.3, {0.02, 0.02, 0.02, 0.01, 0.01, 0.01}, {1, 1, 1, 1, 1, 1}, 0, 1, 0, {}},
  {"talking while sitting",  true,  {0.5, 0.1, 0.86}, 0.5, {0.12, 0.08, 0.06, 0.08, 0.06, 0.05}, {1, 2, 1, 1, 2, 1}, 0, 1, 0, {}},
  {"talking while standing", true,  {0.1, 0.1, 0.99}, 0.6, {0.12, 0.10, 0.06, 0.07, 0.07, 0.05}, {1, 1, 2, 2, 1, 1}, 0, 1, 0, {}},
  {"rest",                   true,  {0.1, 0.1, 0.99}, 0.3, {0.02, 0.02, 0.02, 0.01, 0.01, 0.01}, {1, 1, 1, 1, 1, 1}, 0, 1, 0, {}},
  // everyday motion
  {"walking",                false, {0.0, 0.2, 0.98}, 1.8, {1.5, 1.0, 2.5, 0.8, 0.5, 0.4}, {1, 1, 2, 1, 2, 1}, 0, 1, 0, {}},
  {"walking upstairs",       false, {0.1, 0.3, 0.95}, 1.5, {1.2, 1.6, 2.8, 0.6, 0.9, 0.3}, {1, 2, 2, 1, 1, 2}, 0, 1, 0, {}},
  {"walking downstairs",     false, {0.0, 0.1, 0.99}, 2.1, {1.9, 0.8, 3.4, 1.0, 0.4, 0.7}, {1, 1, 1, 2, 1, 1}, 0, 1, 0, {}},
  {"walking backward",       false, {0.0, -0.3, 0.95}, 1.4, {1.0, 1.8, 1.8, 0.4, 1.0, 0.3}, {2, 1, 1, 1, 1, 2}, 0, 1, 0, {}},
  {"walking in circle",      false, {0.2, 0.2, 0.96}, 1.7, {1.6, 1.2, 2.4, 0.5, 0.6, 0.9}, {1, 1, 2, 1, 2, 1}, 0, 1, 0, {0.0, 0.0, 0.8}},
  {"running",                false, {0.0, 0.3, 0.95}, 2.8, {4.0, 2.5, 6.0, 2.5, 1.5, 1.2}, {1, 1, 2, 1, 1, 2}, 0, 1, 0, {}},
  {"jogging",                false, {0.0, 0.25, 0.97}, 2.3, {2.6, 3.2, 4.2, 1.4, 2.0, 0.9}, {1, 2, 1, 2, 1, 1}, 0, 1, 0, {}},
  {"jumping",                false, {0.0, 0.0, 1.0},  1.2, {1.5, 1.2, 8.0, 1.0, 0.8, 0.4}, {1, 1, 1, 1, 2, 1}, 0.8, 0.45, 0, {}},
  {"push-up",                false, {0.0, 0.95, 0.3}, 0.8, {0.8, 2.5, 1.0, 0.3, 0.2, 1.2}, {1, 1, 1, 1, 1, 1}, 0, 1, 0, {}},
  {"sit-up",                 false, {0.7, 0.0, 0.7},  0.6, {2.5, 0.4, 2.0, 0.2, 1.5, 0.2}, {1, 1, 1, 1, 1, 1}, 0, 1, 0, {}},
  {"table tennis",           false, {0.2, 0.3, 0.93}, 1.0, {2.0, 3.5, 1.0, 2.5, 1.0, 3.0}, {2, 1, 1, 1, 2, 1}, 1.5, 0.6, 0, {}},
  {"picking up",             false, {0.4, 0.4, 0.82}, 0.4, {3.0, 1.0, 2.5, 0.4, 1.2, 0.3}, {1, 1, 1, 1, 1, 1}, 0, 1, 0, {}},
  {"stand to sit",           false, {0.3, 0.0, 0.95}, 0.3, {2.0, 0.3, 2.2, 0.2, 0.9, 0.1}, {1, 1, 1, 1, 1, 1}, 0, 1, 0, {}},
  {"lay to stand",           false, {0.6, 0.0, 0.8},  0.25, {3.5, 0.5, 3.0, 0.3, 1.4, 0.2}, {1, 1, 1, 1, 1, 1}, 0, 1, 0, {}},
  {"cycling",                false, {0.3, 0.2, 0.93}, 1.2, {0.8, 1.6, 0.6, 0.3, 0.3, 1.0}, {1, 1, 2, 1, 1, 1}, 0, 1, 0, {}},
  // physical-education technique
  {"pivoting",               false, {0.1, 0.2, 0.97}, 0.9, {1.2, 1.5, 1.0, 0.5, 0.6, 3.2}, {1, 1, 2, 1, 1, 1}, 0, 1, 0, {0.0, 0.0, 1.2}},
  {"dribbling",              false, {0.0, 0.8, 0.6},  3.0, {1.0, 5.0, 1.5, 0.6, 2.5, 0.4}, {2, 1, 1, 1, 1, 2}, 0, 1, 0, {}},
  {"catching and passing",   false, {0.3, 0.5, 0.81}, 1.5, {5.0, 2.0, 1.5, 1.0, 2.8, 1.5}, {1, 1, 2, 2, 1, 1}, 2.0, 0.55, 0, {}},
  {"quick-step",             false, {0.0, 0.2, 0.98}, 4.0, {2.0, 2.2, 3.0, 1.0, 1.2, 1.6}, {1, 1, 1, 1, 2, 1}, 0, 1, 0, {}},
  {"shooting",               false, {0.2, 0.6, 0.77}, 1.0, {1.5, 3.0, 6.0, 1.0, 3.5, 0.5}, {1, 1, 1, 1, 1, 2}, 2.5, 0.5, 0, {}},
  {"sliding",                false, {0.3, 0.0, 0.95}, 1.3, {4.5, 0.8, 1.2, 0.3, 0.4, 1.0}, {1, 2, 1, 1, 1, 1}, 0, 1, 0, {}},
  {"starting and stopping",  false, {0.0, 0.3, 0.95}, 2.6, {3.5, 2.0, 5.0, 2.0, 1.2, 1.0}, {1, 1, 1, 2, 1, 2}, 3.0, 0.5, 0, {}},
  {"three-step layup",       false, {0.1, 0.4, 0.91}, 2.0, {2.0, 2.5, 5.5, 1.2, 2.0, 0.8}, {1, 2, 1, 1, 1, 1}, 2.2, 0.7, 0.8, {}},
};
// clang-format on

const std::unordered_map<std::string, const Profile*>& profile_index() {
  static const auto index = [] {
    std::unordered_map<std::string, const Profile*> m;
    for (const auto& s : kProfiles) m.emplace(s.name, &s);
    m.emplace("lying", m.at("laying"));
    m.emplace("stand", m.at("standing"));
    m.emplace("sit", m.at("sitting"));
    m.emplace("walk", m.at("walking"));
    m.emplace("run", m.at("running"));
    m.emplace("jump", m.at("jumping"));
    return m;
  }();
  return index;
}

signal::Vec3 normalized(signal::Vec3 v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

LabelSignature derived_signature(const std::string& label) {
  Rng rng(fnv1a(label));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LabelSignature sig;
  sig.label = label;
  sig.gravity_dir = normalized({u(rng) * 0.6 - 0.3, u(rng) * 0.6 - 0.3, 0.8 + 0.2 * u(rng)});
  sig.base_freq_hz = 0.6 + 3.0 * u(rng);
  for (std::size_t c = 0; c < signal::kChannels; ++c) {
    sig.amplitude[c] = c < 3 ? 0.8 + 4.5 * u(rng) : 0.3 + 2.5 * u(rng);
    sig.harmonic[c] = 1.0 + std::floor(2.0 * u(rng));
  }
  if (u(rng) < 0.4) {
    sig.burst_period_s = 1.0 + 2.0 * u(rng);
    sig.burst_duty = 0.4 + 0.4 * u(rng);
  }
  return sig;
}

}  // namespace

bool has_builtin_signature(const std::string& label) { return profile_index().contains(lower(label)); }

LabelSignature signature_for(const std::string& label) {
  const auto& index = profile_index();
  const auto it = index.find(lower(label));
  if (it == index.end()) return derived_signature(label);
  const Profile& s = *it->second;
  LabelSignature sig;
  sig.label = label;
  sig.stationary = s.stationary;
  sig.gravity_dir = normalized(s.gravity);
  sig.base_freq_hz = s.freq;
  sig.amplitude = s.amp;
  sig.harmonic = s.harm;
  Rng phases(fnv1a(s.name) ^ 0x5EEDULL);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (auto& p : sig.phase) p = u(phases);
  sig.gyro_bias = s.gyro_bias;
  sig.burst_period_s = s.burst_period;
  sig.burst_duty = s.burst_duty;
  sig.chirp = s.chirp;
  sig.noise_std = s.stationary ? 0.02 : 0.08;
  return sig;
}

const std::vector<std::string>& kuhar_style_labels() {
  static const std::vector<std::string> labels = {
      "standing", "sitting", "talking while sitting", "talking while standing", "stand to sit", "laying",
      "lay to stand", "picking up", "jumping", "push-up", "sit-up", "walking", "walking backward",
      "walking in circle", "running", "walking upstairs", "walking downstairs", "table tennis"};
  return labels;
}

const std::vector<std::string>& kuhar_style_motion_labels() {
  static const std::vector<std::string> labels = {
      "stand to sit", "lay to stand", "picking up", "jumping", "push-up", "sit-up", "walking",
      "walking backward", "walking in circle", "running", "walking upstairs", "walking downstairs",
      "table tennis"};
  return labels;
}

const std::vector<std::string>& pretraining_labels() {
  static const std::vector<std::string> labels = {
      "standing", "sitting", "laying", "talking while sitting", "walking", "walking upstairs",
      "walking downstairs", "walking backward", "walking in circle", "running", "jogging", "jumping",
      "push-up", "sit-up", "table tennis", "picking up", "stand to sit", "lay to stand", "cycling"};
  return labels;
}

const std::vector<std::string>& pe_class_labels() {
  static const std::vector<std::string> labels = {
      "jumping", "running", "jogging", "walking", "pivoting", "dribbling", "catching and passing",
      "quick-step", "shooting", "sliding", "starting and stopping", "three-step layup"};
  return labels;
}

double quality_amplitude(double score) { return 0.4 + 0.6 * std::clamp(score, 0.0, 5.0) / 5.0; }

signal::Frames render(const LabelSignature& sig, std::size_t n, double rate_hz, double amplitude_scale, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, sig.noise_std);

  const double freq = sig.base_freq_hz * (0.8 + 0.4 * u(rng));
  const double global_phase = kTwoPi * u(rng);
  const double gain = amplitude_scale * (0.85 + 0.3 * u(rng));
  std::array<double, signal::kChannels> amp{};
  for (std::size_t c = 0; c < signal::kChannels; ++c) amp[c] = sig.amplitude[c] * gain * (0.7 + 0.6 * u(rng));
  // Device placement differs between wearers: rotate both sensors together.
  const Eigen::Matrix3d placement = placement_rotation(kMaxPlacementTilt * u(rng), rng);
  const signal::Vec3& g = sig.gravity_dir;
  const double burst_phase = u(rng);
  const double duration = static_cast<double>(n) / rate_hz;

  signal::Frames out(static_cast<Eigen::Index>(n), signal::kChannels);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    const double sweep = duration > 0 ? sig.chirp * t * t / (2.0 * duration) : 0.0;
    double envelope = 1.0;
    if (sig.burst_period_s > 0.0) {
      const double cycle = std::fmod(t / sig.burst_period_s + burst_phase, 1.0);
      const double ramp = 0.1;
      const double on = cycle < sig.burst_duty ? std::min({1.0, cycle / ramp, (sig.burst_duty - cycle) / ramp}) : 0.0;
      envelope = 0.6 + 0.4 * on;
    }
    Eigen::Matrix<double, 6, 1> v;
    for (std::size_t c = 0; c < signal::kChannels; ++c) {
      const double phase = kTwoPi * freq * sig.harmonic[c] * (t + sweep) + sig.phase[c] + global_phase;
      double x = amp[c] * envelope * std::sin(phase);
      if (c < 3) {
        x += kGravity * g[c];
      } else {
        x += sig.gyro_bias[c - 3] * amplitude_scale;
      }
      v[static_cast<Eigen::Index>(c)] = x;
    }
    v.head<3>() = placement * v.head<3>();
    v.tail<3>() = placement * v.tail<3>();
    for (std::size_t c = 0; c < signal::kChannels; ++c) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v[static_cast<Eigen::Index>(c)] + noise(rng);
    }
  }
  return out;
}

namespace {

std::vector<LabeledClip> make_clips(const std::vector<std::string>& labels, const ClipSetConfig& cfg, bool scored) {
  if (cfg.min_frames == 0 || cfg.min_frames > cfg.max_frames)
    throw Error(ErrorCode::kInvalidArgument, "invalid clip length range", "min_frames");
  if (!(cfg.min_amplitude > 0.0) || cfg.min_amplitude > cfg.max_amplitude)
    throw Error(ErrorCode::kInvalidArgument, "invalid amplitude range", "min_amplitude");
  std::vector<LabeledClip> out;
  out.reserve(labels.size() * cfg.per_label);
  Rng rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> len(cfg.min_frames, cfg.max_frames);
  std::uniform_real_distribution<double> amp(cfg.min_amplitude, cfg.max_amplitude);
  std::uniform_real_distribution<double> score(0.0, 5.0);
  for (std::size_t k = 0; k < cfg.per_label; ++k) {
    for (const auto& label : labels) {
      LabeledClip c;
      c.label = label;
      const std::size_t n = len(rng);
      if (scored) {
        c.score = score(rng);
        c.amplitude = quality_amplitude(c.score);
      } else {
        c.amplitude = amp(rng);
      }
      c.frames = render(signature_for(label), n, cfg.rate_hz, c.amplitude, rng);
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace

std::vector<LabeledClip> make_labeled_clips(const std::vector<std::string>& labels, const ClipSetConfig& cfg) {
  return make_clips(labels, cfg, false);
}

std::vector<LabeledClip> make_scored_clips(const std::vector<std::string>& labels, const ClipSetConfig& cfg) {
  return make_clips(labels, cfg, true);
}

}  // namespace kinesis::synth

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/synth/session.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "kinesis/common/error.hpp"
#include "kinesis/common/rng.hpp"
#include "kinesis/synth/generator.hpp"
#include "kinesis/synth/waveform.hpp"

namespace kinesis::synth {

void SessionScript::validate() const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const std::string where = "entries[" + std::to_string(i) + "]";
    if (!(e.duration_s > 0.0) || !std::isfinite(e.duration_s)) {
      throw Error(ErrorCode::kInvalidArgument, "duration must be positive", where + ".duration_s");
    }
    if (!(e.score >= 0.0 && e.score <= 5.0)) {
      throw Error(ErrorCode::kInvalidArgument, "score outside [0, 5]", where + ".score");
    }
    if (e.label != kRestLabel && std::find(labels.begin(), labels.end(), e.label) == labels.end()) {
      throw Error(ErrorCode::kUnknownLabel, "label not in the declared vocabulary", e.label);
    }
  }
}

void to_json(nlohmann::json& j, const SessionScript& s) {
  j = {{"student_id", s.student_id}, {"labels", s.labels}, {"entries", nlohmann::json::array()}};
  for (const auto& e : s.entries) {
    j["entries"].push_back({{"duration_s", e.duration_s}, {"label", e.label}, {"score", e.score}});
  }
}

void from_json(const nlohmann::json& j, SessionScript& s) {
  s.student_id = j.at("student_id").get<std::string>();
  s.labels = j.at("labels").get<std::vector<std::string>>();
  s.entries.clear();
  for (const auto& e : j.at("entries")) {
    s.entries.push_back({e.at("duration_s").get<double>(), e.at("label").get<std::string>(),
                         e.value("score", 0.0)});
  }
}

namespace {

signal::Frames pool_clip(const LabeledSegmentPool& pool, const std::string& label, std::size_t n,
                         double amplitude, Rng& rng) {
  const auto& segs = pool.segments(label);
  std::uniform_int_distribution<std::size_t> pick(0, segs.size() - 1);
  const auto& clip = segs[pick(rng)].frames;
  const auto rows = static_cast<std::size_t>(clip.rows());
  std::size_t offset = 0;
  if (rows > n) offset = std::uniform_int_distribution<std::size_t>(0, rows - n)(rng);
  signal::Frames out = take_frames(clip, offset, n);
  const Eigen::RowVectorXd mean = out.colwise().mean();
  out = ((out.rowwise() - mean) * amplitude).rowwise() + mean;
  return out;
}

}  // namespace

SimulatedSession simulate_class_session(const SessionScript& script, const LabeledSegmentPool& pool,
                                        const SessionConfig& cfg) {
  script.validate();
  if (!pool.empty() && pool.rate() != cfg.rate_hz) {
    throw Error(ErrorCode::kInvalidArgument, "pool rate differs from session rate", "rate_hz");
  }
  // Boundaries are rounded prefix sums so no entry drifts by more than a frame.
  std::vector<std::size_t> lengths;
  std::size_t total = 0;
  double elapsed_s = 0.0;
  for (const auto& e : script.entries) {
    elapsed_s += e.duration_s;
    const auto end = static_cast<std::size_t>(std::llround(elapsed_s * cfg.rate_hz));
    const std::size_t len = std::max<std::size_t>(1, end > total ? end - total : 0);
    lengths.push_back(len);
    total += len;
  }

  SimulatedSession out;
  if (total == 0) {
    out.signal = signal::SignalSequence::from_frames(cfg.rate_hz, signal::Frames(0, signal::kChannels), 0.0,
                                                     script.student_id);
    return out;
  }

  signal::Frames frames(static_cast<Eigen::Index>(total), signal::kChannels);
  std::vector<std::size_t> junctions;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < script.entries.size(); ++i) {
    const auto& e = script.entries[i];
    Rng rng(derive_seed(cfg.seed ^ fnv1a(script.student_id), i));
    const double amplitude = e.label == kRestLabel ? 1.0 : quality_amplitude(e.score);
    signal::Frames part = pool.contains(e.label)
                              ? pool_clip(pool, e.label, lengths[i], amplitude, rng)
                              : render(signature_for(e.label), lengths[i], cfg.rate_hz, amplitude, rng);
    frames.middleRows(static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(lengths[i])) = part;
    if (i > 0) junctions.push_back(pos);
    if (e.label != kRestLabel) {
      out.triplets.push_back({static_cast<double>(pos) / cfg.rate_hz,
                              static_cast<double>(pos + lengths[i]) / cfg.rate_hz, e.label, e.score, false});
    }
    pos += lengths[i];
  }
  const bool can_blend = cfg.blend_width > 0 &&
                         std::all_of(lengths.begin(), lengths.end(),
                                     [&](std::size_t n) { return n >= cfg.blend_width + 2; });
  if (can_blend) blend_junctions(frames, junctions, cfg.blend_width);
  out.signal = signal::SignalSequence::from_frames(cfg.rate_hz, std::move(frames), 0.0, script.student_id);
  return out;
}

std::vector<SessionScript> load_scripts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "cannot open session scripts", path);
  nlohmann::json j;
  try {
    in >> j;
    return j.get<std::vector<SessionScript>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, e.what(), path);
  }
}

}  // namespace kinesis::synth

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/synth/pool.hpp"

#include "kinesis/common/error.hpp"
#include "kinesis/common/rng.hpp"
#include "kinesis/synth/waveform.hpp"

namespace kinesis::synth {

LabeledSegmentPool::LabeledSegmentPool(double rate_hz) : rate_(rate_hz) {
  if (!(rate_hz > 0.0)) throw Error(ErrorCode::kInvalidArgument, "pool rate must be positive");
}

void LabeledSegmentPool::add(const std::string& label, PoolSegment segment) {
  if (segment.frames.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "empty pool segment", label);
  if (segment.source_label.empty()) segment.source_label = label;
  classes_[label].push_back(std::move(segment));
}

void LabeledSegmentPool::add(const std::string& label, const signal::SignalSequence& clip) {
  if (clip.rate() != rate_) throw Error(ErrorCode::kInvalidArgument, "clip rate differs from pool rate", label);
  add(label, PoolSegment{clip.frames(), label});
}

std::vector<std::string> LabeledSegmentPool::labels() const {
  std::vector<std::string> out;
  out.reserve(classes_.size());
  for (const auto& [label, _] : classes_) out.push_back(label);
  return out;
}

const std::vector<PoolSegment>& LabeledSegmentPool::segments(const std::string& label) const {
  const auto it = classes_.find(label);
  if (it == classes_.end()) throw Error(ErrorCode::kUnknownLabel, "label not in pool", label);
  return it->second;
}

std::size_t LabeledSegmentPool::count(const std::string& label) const {
  const auto it = classes_.find(label);
  return it == classes_.end() ? 0 : it->second.size();
}

std::size_t LabeledSegmentPool::total_segments() const {
  std::size_t n = 0;
  for (const auto& [_, segs] : classes_) n += segs.size();
  return n;
}

LabeledSegmentPool relabel_binary(const LabeledSegmentPool& pool, const BinaryPartition& partition) {
  LabeledSegmentPool out(pool.rate());
  for (const auto& label : pool.labels()) {
    const bool motion = partition.motion.contains(label);
    const bool stationary = partition.stationary.contains(label);
    if (motion == stationary) {
      throw Error(ErrorCode::kUnknownLabel,
                  motion ? "label is declared both motion and stationary" : "label is not classified", label);
    }
    for (const auto& seg : pool.segments(label)) out.add(motion ? kMotionClass : kStationaryClass, seg);
  }
  return out;
}

LabeledSegmentPool make_parametric_pool(const std::vector<std::string>& labels, std::size_t clips_per_label,
                                        std::size_t min_frames, std::size_t max_frames, std::uint64_t seed,
                                        double rate_hz) {
  if (min_frames == 0 || min_frames > max_frames) {
    throw Error(ErrorCode::kInvalidArgument, "invalid clip length range");
  }
  LabeledSegmentPool pool(rate_hz);
  for (std::size_t li = 0; li < labels.size(); ++li) {
    const LabelSignature sig = signature_for(labels[li]);
    for (std::size_t k = 0; k < clips_per_label; ++k) {
      Rng rng(derive_seed(seed, li * 1'000'003ULL + k));
      std::uniform_int_distribution<std::size_t> len(min_frames, max_frames);
      const std::size_t n = len(rng);
      pool.add(labels[li], PoolSegment{render(sig, n, rate_hz, 1.0, rng), labels[li]});
    }
  }
  return pool;
}

}  // namespace kinesis::synth

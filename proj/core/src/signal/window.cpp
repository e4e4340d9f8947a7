// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/signal/window.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "kinesis/common/error.hpp"

namespace kinesis::signal {

void WindowConfig::validate() const {
  if (length == 0 || step == 0 || step > length) {
    throw Error(ErrorCode::kInvalidArgument, "window config requires 0 < step <= length");
  }
}

WindowConfig WindowConfig::with_overlap(std::size_t length, std::size_t divisor) {
  return WindowConfig{length, std::max<std::size_t>(1, length / std::max<std::size_t>(1, divisor))};
}

std::vector<WindowSpan> slice_windows(std::size_t n, const WindowConfig& cfg) {
  cfg.validate();
  std::vector<WindowSpan> out;
  if (n == 0) return out;
  if (n <= cfg.length) {
    out.push_back({0, n});
    return out;
  }
  std::size_t start = 0;
  for (; start + cfg.length <= n; start += cfg.step) out.push_back({start, cfg.length});
  if (out.back().end() < n) out.push_back({n - cfg.length, cfg.length});
  return out;
}

std::vector<WindowSpan> slice_windows(const SignalSequence& seq, const WindowConfig& cfg) {
  return slice_windows(seq.size(), cfg);
}

std::vector<std::size_t> coverage_counts(std::size_t n, const WindowConfig& cfg) {
  std::vector<std::size_t> counts(n, 0);
  for (const auto& w : slice_windows(n, cfg)) {
    for (std::size_t f = w.start; f < w.end(); ++f) ++counts[f];
  }
  return counts;
}

Frames extract_window(const Frames& frames, const WindowSpan& span, std::size_t length) {
  Frames out = Frames::Zero(static_cast<Eigen::Index>(length), kChannels);
  const auto valid = static_cast<Eigen::Index>(std::min(span.valid, length));
  out.topRows(valid) = frames.middleRows(static_cast<Eigen::Index>(span.start), valid);
  return out;
}

void to_json(nlohmann::json& j, const WindowConfig& cfg) {
  j = nlohmann::json{{"length", cfg.length}, {"step", cfg.step}};
}

void from_json(const nlohmann::json& j, WindowConfig& cfg) {
  j.at("length").get_to(cfg.length);
  j.at("step").get_to(cfg.step);
  cfg.validate();
}

}  // namespace kinesis::signal

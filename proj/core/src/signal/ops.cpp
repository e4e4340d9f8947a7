// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/signal/ops.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

#include "kinesis/common/error.hpp"

namespace kinesis::signal {

SignalSequence resample(const SignalSequence& seq, double target_rate_hz) {
  if (seq.size() < 2) {
    throw Error(ErrorCode::kInsufficientData, "resampling needs at least two samples");
  }
  if (!(target_rate_hz > 0.0)) throw Error(ErrorCode::kInvalidArgument, "target rate must be positive");

  const auto& ts = seq.timestamps();
  const auto& src = seq.frames();
  const double t0 = ts.front();
  const auto n = static_cast<std::size_t>(std::floor((ts.back() - t0) * target_rate_hz + 1e-9)) + 1;

  std::vector<double> out_t(n);
  Frames out(static_cast<Eigen::Index>(n), kChannels);
  std::size_t j = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) / target_rate_hz;
    out_t[k] = t;
    while (j + 2 < ts.size() && ts[j + 1] <= t) ++j;
    const double ta = ts[j];
    const double tb = ts[j + 1];
    const double w = std::clamp((t - ta) / (tb - ta), 0.0, 1.0);
    const auto a = static_cast<Eigen::Index>(j);
    out.row(static_cast<Eigen::Index>(k)) = (1.0 - w) * src.row(a) + w * src.row(a + 1);
  }
  return SignalSequence(target_rate_hz, std::move(out_t), std::move(out), seq.subject_id());
}

namespace {

template <class Range, class GetFrames>
NormStats fit_impl(const Range& corpus, GetFrames frames_of) {
  std::array<double, kChannels> sum{};
  std::size_t count = 0;
  for (const auto& item : corpus) {
    const Frames& f = frames_of(item);
    for (std::size_t c = 0; c < kChannels; ++c) sum[c] += f.col(static_cast<Eigen::Index>(c)).sum();
    count += static_cast<std::size_t>(f.rows());
  }
  if (count == 0) throw Error(ErrorCode::kEmptyInput, "cannot fit normalization on an empty corpus");

  NormStats stats;
  for (std::size_t c = 0; c < kChannels; ++c) stats.mean[c] = sum[c] / static_cast<double>(count);
  std::array<double, kChannels> sq{};
  for (const auto& item : corpus) {
    const Frames& f = frames_of(item);
    for (std::size_t c = 0; c < kChannels; ++c) {
      sq[c] += (f.col(static_cast<Eigen::Index>(c)).array() - stats.mean[c]).square().sum();
    }
  }
  for (std::size_t c = 0; c < kChannels; ++c) {
    stats.std[c] = std::max(std::sqrt(sq[c] / static_cast<double>(count)), kMinChannelStd);
  }
  return stats;
}

}  // namespace

NormStats fit_norm_stats(std::span<const SignalSequence> corpus) {
  return fit_impl(corpus, [](const SignalSequence& s) -> const Frames& { return s.frames(); });
}

NormStats fit_norm_stats(std::span<const Frames> corpus) {
  return fit_impl(corpus, [](const Frames& f) -> const Frames& { return f; });
}

void normalize_in_place(Frames& frames, const NormStats& stats) {
  for (std::size_t c = 0; c < kChannels; ++c) {
    auto col = frames.col(static_cast<Eigen::Index>(c));
    col = (col.array() - stats.mean[c]) / stats.std[c];
  }
}

SignalSequence apply_norm(const SignalSequence& seq, const NormStats& stats) {
  Frames f = seq.frames();
  normalize_in_place(f, stats);
  return SignalSequence(seq.rate(), seq.timestamps(), std::move(f), seq.subject_id());
}

SignalSequence invert_norm(const SignalSequence& seq, const NormStats& stats) {
  Frames f = seq.frames();
  for (std::size_t c = 0; c < kChannels; ++c) {
    auto col = f.col(static_cast<Eigen::Index>(c));
    col = col.array() * stats.std[c] + stats.mean[c];
  }
  return SignalSequence(seq.rate(), seq.timestamps(), std::move(f), seq.subject_id());
}

void to_json(nlohmann::json& j, const NormStats& stats) {
  j = nlohmann::json{{"mean", stats.mean}, {"std", stats.std}};
}

void from_json(const nlohmann::json& j, NormStats& stats) {
  j.at("mean").get_to(stats.mean);
  j.at("std").get_to(stats.std);
}

}  // namespace kinesis::signal

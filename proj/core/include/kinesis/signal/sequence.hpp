// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace kinesis::signal {

/// Rate every ingested signal is resampled to.
inline constexpr double kCanonicalRateHz = 50.0;
/// ax, ay, az (m/s^2), gx, gy, gz (rad/s).
inline constexpr std::size_t kChannels = 6;

using Vec3 = std::array<double, 3>;

/// Row-major frame matrix, one row per sample, one column per channel.
using Frames = Eigen::Matrix<double, Eigen::Dynamic, static_cast<int>(kChannels), Eigen::RowMajor>;

struct ImuSample {
  double t = 0.0;
  Vec3 accel{};
  Vec3 gyro{};

  double channel(std::size_t c) const { return c < 3 ? accel[c] : gyro[c - 3]; }
  bool finite() const;
};

/// Immutable, validated IMU stream: strictly increasing timestamps and finite
/// channel values. Stored column-wise as timestamps plus a frame matrix.
class SignalSequence {
 public:
  SignalSequence();
  SignalSequence(double rate_hz, std::vector<double> timestamps, Frames values,
                 std::optional<std::string> subject_id = std::nullopt);
  SignalSequence(double rate_hz, const std::vector<ImuSample>& samples,
                 std::optional<std::string> subject_id = std::nullopt);

  /// Uniform timestamps t0 + i / rate.
  static SignalSequence from_frames(double rate_hz, Frames values, double t0 = 0.0,
                                    std::optional<std::string> subject_id = std::nullopt);

  double rate() const { return rate_; }
  std::size_t size() const { return timestamps_.size(); }
  bool empty() const { return timestamps_.empty(); }
  const std::vector<double>& timestamps() const { return timestamps_; }
  const Frames& frames() const { return values_; }
  const std::optional<std::string>& subject_id() const { return subject_id_; }

  ImuSample sample(std::size_t i) const;
  std::vector<ImuSample> samples() const;

  /// Frames [begin, end) as a new sequence sharing rate and subject.
  SignalSequence slice(std::size_t begin, std::size_t end) const;
  SignalSequence with_subject(std::optional<std::string> subject_id) const;

  /// t_last - t0, or 0 for fewer than two samples.
  double span() const;

  friend bool operator==(const SignalSequence&, const SignalSequence&);

 private:
  void validate() const;

  double rate_;
  std::vector<double> timestamps_;
  Frames values_;
  std::optional<std::string> subject_id_;
};

}  // namespace kinesis::signal

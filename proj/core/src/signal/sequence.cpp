// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/signal/sequence.hpp"

#include <cmath>
#include <tuple>

#include "kinesis/common/error.hpp"

namespace kinesis::signal {

bool ImuSample::finite() const {
  if (!std::isfinite(t)) return false;
  for (std::size_t c = 0; c < kChannels; ++c) {
    if (!std::isfinite(channel(c))) return false;
  }
  return true;
}

SignalSequence::SignalSequence() : rate_(kCanonicalRateHz), values_(0, kChannels) {}

SignalSequence::SignalSequence(double rate_hz, std::vector<double> timestamps, Frames values,
                               std::optional<std::string> subject_id)
    : rate_(rate_hz),
      timestamps_(std::move(timestamps)),
      values_(std::move(values)),
      subject_id_(std::move(subject_id)) {
  validate();
}

void SignalSequence::validate() const {
  if (!(rate_ > 0.0) || !std::isfinite(rate_)) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive and finite");
  }
  if (static_cast<std::size_t>(values_.rows()) != timestamps_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "timestamp count does not match frame count");
  }
  for (std::size_t i = 0; i < timestamps_.size(); ++i) {
    if (!std::isfinite(timestamps_[i]) || !values_.row(static_cast<Eigen::Index>(i)).allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite value at sample " + std::to_string(i),
                  std::to_string(i));
    }
    if (i > 0 && !(timestamps_[i] > timestamps_[i - 1])) {
      throw Error(ErrorCode::kNonMonotone,
                  "timestamps must be strictly increasing; violated at sample " + std::to_string(i),
                  std::to_string(i));
    }
  }
}

namespace {

std::pair<std::vector<double>, Frames> split_samples(const std::vector<ImuSample>& samples) {
  std::vector<double> t(samples.size());
  Frames v(static_cast<Eigen::Index>(samples.size()), kChannels);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    t[i] = samples[i].t;
    for (std::size_t c = 0; c < kChannels; ++c) {
      v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = samples[i].channel(c);
    }
  }
  return {std::move(t), std::move(v)};
}

}  // namespace

SignalSequence::SignalSequence(double rate_hz, const std::vector<ImuSample>& samples,
                               std::optional<std::string> subject_id)
    : rate_(rate_hz), subject_id_(std::move(subject_id)) {
  std::tie(timestamps_, values_) = split_samples(samples);
  validate();
}

SignalSequence SignalSequence::from_frames(double rate_hz, Frames values, double t0,
                                           std::optional<std::string> subject_id) {
  std::vector<double> t(static_cast<std::size_t>(values.rows()));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = t0 + static_cast<double>(i) / rate_hz;
  return SignalSequence(rate_hz, std::move(t), std::move(values), std::move(subject_id));
}

ImuSample SignalSequence::sample(std::size_t i) const {
  if (i >= size()) throw Error(ErrorCode::kOutOfBounds, "sample index out of range");
  const auto r = static_cast<Eigen::Index>(i);
  return ImuSample{timestamps_[i],
                   {values_(r, 0), values_(r, 1), values_(r, 2)},
                   {values_(r, 3), values_(r, 4), values_(r, 5)}};
}

std::vector<ImuSample> SignalSequence::samples() const {
  std::vector<ImuSample> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(sample(i));
  return out;
}

SignalSequence SignalSequence::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw Error(ErrorCode::kOutOfBounds, "slice out of range");
  std::vector<double> t(timestamps_.begin() + static_cast<std::ptrdiff_t>(begin),
                        timestamps_.begin() + static_cast<std::ptrdiff_t>(end));
  Frames v = values_.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin));
  return SignalSequence(rate_, std::move(t), std::move(v), subject_id_);
}

SignalSequence SignalSequence::with_subject(std::optional<std::string> subject_id) const {
  SignalSequence copy = *this;
  copy.subject_id_ = std::move(subject_id);
  return copy;
}

double SignalSequence::span() const {
  return size() < 2 ? 0.0 : timestamps_.back() - timestamps_.front();
}

bool operator==(const SignalSequence& a, const SignalSequence& b) {
  return a.rate_ == b.rate_ && a.timestamps_ == b.timestamps_ && a.values_ == b.values_ &&
         a.subject_id_ == b.subject_id_;
}

}  // namespace kinesis::signal

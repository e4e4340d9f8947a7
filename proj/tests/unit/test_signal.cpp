// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kinesis/common/rng.hpp"
#include "kinesis/signal/csv.hpp"
#include "kinesis/signal/ops.hpp"
#include "kinesis/signal/window.hpp"
#include "test_util.hpp"

namespace kinesis::signal {
namespace {

using test::TempDir;

Frames random_frames(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 2.0);
  Frames f(static_cast<Eigen::Index>(n), kChannels);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = g(rng);
  return f;
}

TEST(LoadSignal, ParsesWellFormedRows) {
  TempDir dir;
  const auto p = dir.write("s.csv",
                           "t,ax,ay,az,gx,gy,gz\n"
                           "0.00,1,2,3,4,5,6\n"
                           "0.02,1,2,3,4,5,6\n"
                           "0.04,1,2,3,4,5,6.5\n");
  const auto seq = load_signal(p);
  ASSERT_EQ(seq.size(), 3u);
  EXPECT_NEAR(seq.rate(), 50.0, 1e-9);
  EXPECT_DOUBLE_EQ(seq.frames()(2, 5), 6.5);
}

TEST(LoadSignal, HeaderOnlyIsEmpty) {
  TempDir dir;
  EXPECT_EQ(load_signal(dir.write("e.csv", "t,ax,ay,az,gx,gy,gz\n")).size(), 0u);
}

TEST(LoadSignal, DecreasingTimeNamesTheSample) {
  TempDir dir;
  const auto p = dir.write("bad.csv",
                           "t,ax,ay,az,gx,gy,gz\n"
                           "0.0,0,0,0,0,0,0\n"
                           "0.1,0,0,0,0,0,0\n"
                           "0.05,0,0,0,0,0,0\n");
  EXPECT_KINESIS_ERROR(load_signal(p), kNonMonotone, EXPECT_EQ(err.subject(), "2"));
}

TEST(LoadSignal, MalformedRowNamesTheLine) {
  TempDir dir;
  const auto p = dir.write("bad.csv", "t,ax,ay,az,gx,gy,gz\n0.0,0,0,0,0,0,0\n0.1,0,x,0,0,0,0\n");
  EXPECT_KINESIS_ERROR(load_signal(p), kParse, EXPECT_EQ(err.subject(), "3"));
}

TEST(LoadSignal, SaveRoundTripKeepsValuesAndSubject) {
  TempDir dir;
  Rng rng(3);
  const auto seq = SignalSequence::from_frames(kCanonicalRateHz, random_frames(40, rng), 0.0, "s07");
  save_signal(dir / "r.csv", seq);
  const auto back = load_signal(dir / "r.csv");
  EXPECT_EQ(back, seq);
  EXPECT_EQ(back.subject_id(), std::optional<std::string>("s07"));
}

TEST(Resample, SameRateIsIdentity) {
  Rng rng(1);
  const auto seq = SignalSequence::from_frames(50.0, random_frames(30, rng));
  const auto out = resample(seq, 50.0);
  ASSERT_EQ(out.size(), seq.size());
  EXPECT_LE((out.frames() - seq.frames()).cwiseAbs().maxCoeff(), 1e-9);
  const auto twice = resample(out, 50.0);
  EXPECT_LE((twice.frames() - out.frames()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Resample, TwoPointRampAtFiveHertz) {
  std::vector<ImuSample> s(2);
  s[0].t = 0.0;
  s[1].t = 1.0;
  s[1].accel = {1.0, 1.0, 1.0};
  s[1].gyro = {1.0, 1.0, 1.0};
  const auto out = resample(SignalSequence(1.0, s), 5.0);
  ASSERT_EQ(out.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(out.timestamps()[i], 0.2 * static_cast<double>(i), 1e-12);
    for (std::size_t c = 0; c < kChannels; ++c)
      EXPECT_NEAR(out.frames()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)), 0.2 * static_cast<double>(i), 1e-12);
  }
}

TEST(Resample, MatchesScalarInterpolationOracle) {
  Rng rng(11);
  std::uniform_real_distribution<double> gap(0.01, 0.2);
  std::vector<double> t{0.0};
  for (int i = 1; i < 10; ++i) t.push_back(t.back() + gap(rng));
  const auto frames = random_frames(10, rng);
  const SignalSequence seq(37.0, t, frames);
  const auto out = resample(seq, 23.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double tk = out.timestamps()[k];
    EXPECT_NEAR(tk, static_cast<double>(k) / 23.0, 1e-9);
    std::size_t j = 0;
    while (j + 2 < t.size() && t[j + 1] <= tk) ++j;
    const double w = (tk - t[j]) / (t[j + 1] - t[j]);
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(kChannels); ++c) {
      const double expected = (1 - w) * frames(static_cast<Eigen::Index>(j), c) + w * frames(static_cast<Eigen::Index>(j + 1), c);
      EXPECT_NEAR(out.frames()(static_cast<Eigen::Index>(k), c), expected, 1e-9);
    }
  }
  EXPECT_LE(out.timestamps().back(), t.back() + 1e-12);
  for (std::size_t k = 1; k < out.size(); ++k)
    EXPECT_NEAR(out.timestamps()[k] - out.timestamps()[k - 1], 1.0 / 23.0, 1e-9);
}

TEST(Resample, NeedsTwoSamples) {
  std::vector<ImuSample> one(1);
  EXPECT_KINESIS_ERROR(resample(SignalSequence(50.0, one), 25.0), kInsufficientData, {});
}

TEST(NormStats, TwoPointChannel) {
  Frames f = Frames::Zero(2, kChannels);
  f(0, 0) = 1.0;
  f(1, 0) = 3.0;
  const auto seq = SignalSequence::from_frames(50.0, f);
  const auto stats = fit_norm_stats(std::span<const SignalSequence>(&seq, 1));
  EXPECT_DOUBLE_EQ(stats.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(stats.std[0], 1.0);
  const auto n = apply_norm(seq, stats);
  EXPECT_DOUBLE_EQ(n.frames()(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(n.frames()(1, 0), 1.0);
}

TEST(NormStats, ConstantChannelIsClampedAndZeroed) {
  Frames f = Frames::Constant(5, kChannels, 9.81);
  const auto seq = SignalSequence::from_frames(50.0, f);
  const auto stats = fit_norm_stats(std::span<const SignalSequence>(&seq, 1));
  for (double s : stats.std) EXPECT_DOUBLE_EQ(s, kMinChannelStd);
  EXPECT_EQ(apply_norm(seq, stats).frames().cwiseAbs().maxCoeff(), 0.0);
}

TEST(NormStats, RandomCorpusNormalisesToZeroMeanUnitStd) {
  Rng rng(5);
  std::vector<SignalSequence> corpus;
  for (int i = 0; i < 4; ++i) corpus.push_back(SignalSequence::from_frames(50.0, random_frames(25, rng)));
  const auto stats = fit_norm_stats(std::span<const SignalSequence>(corpus));
  Eigen::MatrixXd all(100, kChannels);
  for (int i = 0; i < 4; ++i) all.middleRows(25 * i, 25) = apply_norm(corpus[static_cast<std::size_t>(i)], stats).frames();
  for (Eigen::Index c = 0; c < all.cols(); ++c) {
    const double mean = all.col(c).mean();
    const double var = (all.col(c).array() - mean).square().mean();
    EXPECT_NEAR(mean, 0.0, 1e-6);
    EXPECT_NEAR(std::sqrt(var), 1.0, 1e-6);
  }
  const auto back = invert_norm(apply_norm(corpus[0], stats), stats);
  EXPECT_LE((back.frames() - corpus[0].frames()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(NormStats, EmptyCorpusFails) {
  std::vector<SignalSequence> none;
  EXPECT_KINESIS_ERROR(fit_norm_stats(std::span<const SignalSequence>(none)), kEmptyInput, {});
}

std::vector<std::size_t> brute_coverage(std::size_t n, const WindowConfig& cfg) {
  std::vector<std::size_t> cover(n, 0);
  for (const auto& w : slice_windows(n, cfg))
    for (std::size_t f = 0; f < n; ++f)
      if (f >= w.start && f < w.start + w.valid) ++cover[f];
  return cover;
}

TEST(SliceWindows, TenFramesWindowFourStepTwo) {
  const auto w = slice_windows(10, {4, 2});
  std::vector<std::size_t> starts;
  for (const auto& s : w) starts.push_back(s.start);
  EXPECT_EQ(starts, (std::vector<std::size_t>{0, 2, 4, 6}));
  EXPECT_EQ(brute_coverage(10, {4, 2})[4], 2u);
}

TEST(SliceWindows, ExactLengthGivesOneWindow) {
  EXPECT_EQ(slice_windows(8, {8, 2}).size(), 1u);
}

TEST(SliceWindows, QuarterStepCoversInteriorFourTimes) {
  const auto cover = brute_coverage(16, {8, 2});
  for (std::size_t f = 6; f <= 9; ++f) EXPECT_EQ(cover[f], 4u) << "frame " << f;
}

TEST(SliceWindows, ShortSequenceIsOnePaddedWindow) {
  const auto w = slice_windows(5, {8, 2});
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].start, 0u);
  EXPECT_EQ(w[0].valid, 5u);
}

TEST(SliceWindows, CoverageMatchesBruteForceOnAllSmallGrids) {
  for (std::size_t n = 1; n <= 64; ++n)
    for (std::size_t len = 1; len <= 16; ++len)
      for (std::size_t step = 1; step <= len; ++step) {
        const WindowConfig cfg{len, step};
        const auto cover = coverage_counts(n, cfg);
        ASSERT_EQ(cover, brute_coverage(n, cfg)) << n << " " << len << " " << step;
        for (auto c : cover) ASSERT_GE(c, 1u);
        const auto w = slice_windows(n, cfg);
        ASSERT_EQ(w.front().start, 0u);
        ASSERT_EQ(w.back().end(), n);
      }
}

TEST(WindowConfig, RejectsStepLongerThanWindow) {
  EXPECT_KINESIS_ERROR((WindowConfig{4, 5}.validate()), kInvalidArgument, {});
  EXPECT_KINESIS_ERROR((WindowConfig{4, 0}.validate()), kInvalidArgument, {});
}

}  // namespace
}  // namespace kinesis::signal

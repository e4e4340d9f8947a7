// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>

#include "kinesis/synth/dataset_io.hpp"
#include "kinesis/synth/generator.hpp"
#include "kinesis/synth/pool.hpp"
#include "kinesis/synth/session.hpp"
#include "kinesis/synth/waveform.hpp"
#include "test_util.hpp"

namespace kinesis::synth {
namespace {

using signal::Frames;
using test::TempDir;

Frames constant_clip(std::size_t n, double v) { return Frames::Constant(static_cast<Eigen::Index>(n), signal::kChannels, v); }

LabeledSegmentPool binary_constant_pool() {
  LabeledSegmentPool pool;
  pool.add(kMotionClass, PoolSegment{constant_clip(400, 1.0), "walking"});
  pool.add(kStationaryClass, PoolSegment{constant_clip(400, 0.0), "sitting"});
  return pool;
}

TEST(RelabelBinary, DirectMapping) {
  LabeledSegmentPool pool;
  pool.add("walking", PoolSegment{constant_clip(10, 1.0), "walking"});
  pool.add("sitting", PoolSegment{constant_clip(10, 0.0), "sitting"});
  const auto bin = relabel_binary(pool, {{"walking"}, {"sitting"}});
  EXPECT_EQ(bin.labels(), (std::vector<std::string>{kMotionClass, kStationaryClass}));
  EXPECT_EQ(bin.segments(kMotionClass).front().source_label, "walking");
  EXPECT_EQ(bin.segments(kStationaryClass).front().source_label, "sitting");
}

TEST(RelabelBinary, UnclassifiedLabelIsNamed) {
  LabeledSegmentPool pool;
  pool.add("jumping", PoolSegment{constant_clip(10, 1.0), "jumping"});
  EXPECT_KINESIS_ERROR(relabel_binary(pool, {{"walking"}, {"sitting"}}), kUnknownLabel,
                       EXPECT_EQ(err.subject(), "jumping"));
}

TEST(RelabelBinary, CountsAggregateOverMemberClasses) {
  const auto& labels = kuhar_style_labels();
  auto pool = make_parametric_pool(labels, 3, 20, 40, 1);
  BinaryPartition part;
  std::size_t expected_motion = 0;
  std::size_t expected_stationary = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    // Uneven per-class counts make the sum check meaningful.
    for (std::size_t extra = 0; extra < i % 3; ++extra) {
      pool.add(labels[i], PoolSegment{constant_clip(20, 0.0), labels[i]});
    }
  }
  const auto& motion = kuhar_style_motion_labels();
  for (const auto& l : labels) {
    const bool m = std::find(motion.begin(), motion.end(), l) != motion.end();
    (m ? part.motion : part.stationary).insert(l);
    (m ? expected_motion : expected_stationary) += pool.count(l);
  }
  const auto bin = relabel_binary(pool, part);
  EXPECT_EQ(bin.count(kMotionClass), expected_motion);
  EXPECT_EQ(bin.count(kStationaryClass), expected_stationary);
  EXPECT_EQ(bin.total_segments(), pool.total_segments());
}

TEST(BlendTransition, ScalarRampWidthFour) {
  Frames a = constant_clip(4, 1.0);
  Frames b = constant_clip(4, 0.0);
  const auto out = blend_transition(a, b, 4);
  const double expected[] = {0.8, 0.6, 0.4, 0.2};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(out(k, 0), expected[k], 1e-12);
}

TEST(BlendTransition, EqualEndpointsGiveConstant) {
  const auto out = blend_transition(constant_clip(5, 2.5), constant_clip(5, 2.5), 3);
  EXPECT_EQ(out.cwiseAbs().maxCoeff(), 2.5);
  EXPECT_EQ(out.minCoeff(), 2.5);
}

TEST(BlendTransition, RandomEndpointsMatchAffineOracle) {
  Rng rng(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  Frames a(9, signal::kChannels), b(9, signal::kChannels);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a.data()[i] = u(rng);
    b.data()[i] = u(rng);
  }
  const std::size_t w = 7;
  const auto out = blend_transition(a, b, w);
  ASSERT_EQ(out.rows(), 7);
  for (std::size_t k = 1; k <= w; ++k)
    for (Eigen::Index c = 0; c < 6; ++c) {
      const double f = static_cast<double>(k) / static_cast<double>(w + 1);
      EXPECT_NEAR(out(static_cast<Eigen::Index>(k - 1), c), a(8, c) * (1 - f) + b(0, c) * f, 1e-9);
    }
}

TEST(BlendTransition, RejectsBadWidth) {
  EXPECT_KINESIS_ERROR(blend_transition(constant_clip(3, 0), constant_clip(3, 0), 0), kInvalidArgument, {});
  EXPECT_KINESIS_ERROR(blend_transition(constant_clip(3, 0), constant_clip(3, 0), 4), kInvalidArgument, {});
}

TEST(SynthesizeSequence, SingleMotionSegmentIsAllMotion) {
  LabeledSegmentPool pool;
  pool.add(kMotionClass, PoolSegment{constant_clip(100, 1.0), "walking"});
  SynthConfig cfg;
  cfg.min_segments = cfg.max_segments = 1;
  cfg.min_length = 50;
  cfg.max_length = 80;
  Rng rng(1);
  const auto s = synthesize_sequence(pool, cfg, rng);
  EXPECT_EQ(s.mask.size(), s.signal.size());
  EXPECT_TRUE(std::all_of(s.mask.begin(), s.mask.end(), [](auto v) { return v == 1; }));
}

TEST(SynthesizeSequence, UnblendedJunctionIsExact) {
  SynthConfig cfg;
  cfg.min_segments = cfg.max_segments = 2;
  cfg.blend_width = 0;
  cfg.min_length = cfg.max_length = 200;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const auto s = synthesize_sequence(binary_constant_pool(), cfg, rng);
    ASSERT_EQ(s.draws.size(), 2u);
    const std::size_t cut = s.draws[0].length;
    for (std::size_t f = 0; f < s.mask.size(); ++f) {
      const auto& d = s.draws[f < cut ? 0 : 1];
      ASSERT_EQ(s.mask[f], d.motion ? 1 : 0);
      ASSERT_EQ(s.signal.frames()(static_cast<Eigen::Index>(f), 0), d.motion ? 1.0 : 0.0);
    }
  }
}

TEST(SynthesizeSequence, MaskMatchesIndependentReplayOfDrawLog) {
  const auto pool = relabel_binary(make_parametric_pool({"walking", "sitting"}, 4, 100, 600, 3),
                                   {{"walking"}, {"sitting"}});
  SynthConfig cfg;
  cfg.min_segments = cfg.max_segments = 5;
  cfg.seed = 17;
  Rng rng(cfg.seed);
  const auto s = synthesize_sequence(pool, cfg, rng);
  ASSERT_EQ(s.draws.size(), 5u);
  // Oracle: owner of frame f is the segment whose span contains f, shifted
  // so the pre-junction half of each blend belongs to the later segment.
  std::vector<std::size_t> ends;
  std::size_t acc = 0;
  for (const auto& d : s.draws) ends.push_back(acc += d.length);
  ASSERT_EQ(acc, s.signal.size());
  const std::size_t lead = (cfg.blend_width + 1) / 2;
  for (std::size_t f = 0; f < acc; ++f) {
    std::size_t owner = 0;
    while (owner + 1 < ends.size() && f + lead >= ends[owner]) ++owner;
    ASSERT_EQ(s.mask[f], s.draws[owner].motion ? 1 : 0) << "frame " << f;
  }
  // Frames away from junctions are copied from the drawn clip.
  std::size_t start = 0;
  for (const auto& d : s.draws) {
    const auto& clip = pool.segments(d.motion ? kMotionClass : kStationaryClass)[d.segment_index].frames;
    const std::size_t mid = start + d.length / 2;
    const auto src = static_cast<Eigen::Index>((d.offset + d.length / 2) % static_cast<std::size_t>(clip.rows()));
    EXPECT_EQ(s.signal.frames().row(static_cast<Eigen::Index>(mid)), clip.row(src));
    start += d.length;
  }
  EXPECT_GE(s.signal.size(), cfg.min_length);
  EXPECT_LE(s.signal.size(), cfg.max_length);
}

TEST(SynthesizeSequence, EmptyPoolFails) {
  LabeledSegmentPool pool;
  Rng rng(0);
  EXPECT_KINESIS_ERROR(synthesize_sequence(pool, SynthConfig{}, rng), kEmptyInput, {});
}

TEST(SynthesizeDataset, SingleItemEqualsOneCall) {
  SynthConfig cfg;
  cfg.seed = 9;
  const auto pool = binary_constant_pool();
  const auto ds = synthesize_dataset(pool, cfg, 1);
  Rng rng(derive_seed(cfg.seed, 0));
  const auto one = synthesize_sequence(pool, cfg, rng);
  EXPECT_EQ(ds.signals[0], one.signal);
  EXPECT_EQ(ds.masks[0], one.mask);
}

TEST(SynthesizeDataset, DeterministicAndByteIdenticalOnDisk) {
  const auto pool = relabel_binary(make_parametric_pool({"walking", "sitting"}, 3, 100, 300, 3),
                                   {{"walking"}, {"sitting"}});
  SynthConfig cfg;
  cfg.seed = 5;
  cfg.max_length = 600;
  TempDir a, b;
  save_dataset(a.path(), synthesize_dataset(pool, cfg, 4));
  save_dataset(b.path(), synthesize_dataset(pool, cfg, 4));
  for (const auto& e : std::filesystem::recursive_directory_iterator(a.path())) {
    if (!e.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(e.path(), a.path());
    EXPECT_EQ(test::read_file(e.path()), test::read_file(b.path() / rel)) << rel;
  }
  const auto back = load_dataset(a.path());
  const auto again = synthesize_dataset(pool, cfg, 4);
  ASSERT_EQ(back.masks, again.masks);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_LE((back.signals[i].frames() - again.signals[i].frames()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SynthesizeDataset, MotionFractionNearMixProbability) {
  SynthConfig cfg;
  cfg.seed = 21;
  cfg.max_length = 600;
  const auto ds = synthesize_dataset(binary_constant_pool(), cfg, 1000);
  std::size_t motion = 0, total = 0;
  for (std::size_t i = 0; i < ds.masks.size(); ++i) {
    ASSERT_EQ(ds.masks[i].size(), ds.signals[i].size());
    motion += static_cast<std::size_t>(std::count(ds.masks[i].begin(), ds.masks[i].end(), 1));
    total += ds.masks[i].size();
  }
  const double frac = static_cast<double>(motion) / static_cast<double>(total);
  EXPECT_NEAR(frac, 0.5, 0.05);
  EXPECT_DOUBLE_EQ(ds.summary.motion_fraction, frac);
}

TEST(SynthesizeDataset, RejectsZeroCount) {
  EXPECT_KINESIS_ERROR(synthesize_dataset(binary_constant_pool(), SynthConfig{}, 0), kInvalidArgument, {});
}

SessionScript script(std::vector<SessionEntry> entries) {
  SessionScript s;
  s.student_id = "s01";
  s.labels = pe_class_labels();
  s.labels.push_back("running");
  s.entries = std::move(entries);
  return s;
}

TEST(Session, EmptyScriptIsEmpty) {
  const auto out = simulate_class_session(script({}), LabeledSegmentPool{}, SessionConfig{});
  EXPECT_EQ(out.signal.size(), 0u);
  EXPECT_TRUE(out.triplets.empty());
}

TEST(Session, SingleEntryTriplet) {
  const auto out = simulate_class_session(script({{10.0, "running", 4.0}}), LabeledSegmentPool{}, SessionConfig{});
  ASSERT_EQ(out.triplets.size(), 1u);
  EXPECT_NEAR(out.triplets[0].start_s, 0.0, 0.02);
  EXPECT_NEAR(out.triplets[0].end_s, 10.0, 0.02);
  EXPECT_EQ(out.triplets[0].label, "running");
  EXPECT_DOUBLE_EQ(out.triplets[0].score, 4.0);
  EXPECT_EQ(out.signal.size(), 500u);
}

TEST(Session, BoundariesArePrefixSums) {
  const std::vector<SessionEntry> entries{{3.3, "dribbling", 2.0},
                                          {4.07, "rest", 0.0},
                                          {5.55, "shooting", 3.5},
                                          {2.01, "running", 1.0},
                                          {6.25, "catching and passing", 4.5}};
  const auto out = simulate_class_session(script(entries), LabeledSegmentPool{}, SessionConfig{});
  ASSERT_EQ(out.triplets.size(), 4u);
  std::vector<double> ends;
  double elapsed = 0.0;
  for (const auto& e : entries) ends.push_back(elapsed += e.duration_s);
  std::size_t t = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].label == kRestLabel) continue;
    const double start = i ? ends[i - 1] : 0.0;
    EXPECT_NEAR(out.triplets[t].start_s, start, 0.02);
    EXPECT_NEAR(out.triplets[t].end_s, ends[i], 0.02);
    EXPECT_EQ(out.triplets[t].label, entries[i].label);
    EXPECT_EQ(out.triplets[t].score, entries[i].score);
    ++t;
  }
  EXPECT_NEAR(static_cast<double>(out.signal.size()) / 50.0, ends.back(), 0.02);
}

TEST(Session, UndeclaredLabelIsNamed) {
  auto s = script({{2.0, "juggling", 1.0}});
  EXPECT_KINESIS_ERROR(simulate_class_session(s, LabeledSegmentPool{}, SessionConfig{}), kUnknownLabel,
                       EXPECT_EQ(err.subject(), "juggling"));
}

TEST(Session, FixtureRoundTripsGold) {
  std::vector<SessionScript> scripts{script({{4.0, "rest", 0}, {6.0, "dribbling", 3.0}})};
  scripts[0].student_id = "s09";
  std::vector<SimulatedSession> sessions{simulate_class_session(scripts[0], LabeledSegmentPool{}, SessionConfig{})};
  TempDir dir;
  save_session_fixture(dir.path(), scripts, sessions);
  const auto gold = load_session_gold(dir.path());
  ASSERT_EQ(gold.size(), 1u);
  EXPECT_EQ(gold[0].student_id, "s09");
  EXPECT_EQ(gold[0].triplets, sessions[0].triplets);
  EXPECT_DOUBLE_EQ(gold[0].duration_s, 10.0);
}

TEST(Clips, ScoredClipsStayInRangeAndAreDeterministic) {
  ClipSetConfig cfg;
  cfg.per_label = 3;
  cfg.seed = 8;
  const auto a = make_scored_clips(pe_class_labels(), cfg);
  const auto b = make_scored_clips(pe_class_labels(), cfg);
  ASSERT_EQ(a.size(), 3 * pe_class_labels().size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_GE(a[i].score, 0.0);
    EXPECT_LE(a[i].score, 5.0);
    EXPECT_GE(a[i].frames.rows(), 100);
    EXPECT_LE(a[i].frames.rows(), 200);
    EXPECT_EQ(a[i].frames, b[i].frames);
  }
}

TEST(Masks, SaveLoadRoundTrip) {
  TempDir dir;
  const MotionMask m{0, 0, 1, 1, 1, 0, 1};
  save_mask(dir / "m.csv", m);
  EXPECT_EQ(load_mask(dir / "m.csv"), m);
}

}  // namespace
}  // namespace kinesis::synth

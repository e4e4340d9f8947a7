// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "kinesis/pipeline/analyze.hpp"
#include "kinesis/pipeline/serialize.hpp"
#include "kinesis/pipeline/stats.hpp"
#include "kinesis/pipeline/triplet.hpp"
#include "test_util.hpp"

namespace kinesis::pipeline {
namespace {

using nlohmann::json;

const std::vector<std::string> kLabels{"dribbling", "shooting", "running", "jumping"};

// Sorted, disjoint triplets on the 50 Hz grid.
std::vector<ActionTriplet> random_triplets(Rng& rng, std::size_t max_count, double* end_out = nullptr) {
  std::uniform_int_distribution<std::size_t> count(0, max_count);
  std::uniform_int_distribution<int> gap(0, 200), len(1, 500);
  std::uniform_int_distribution<std::size_t> pick(0, kLabels.size() - 1);
  std::uniform_real_distribution<double> score(0.0, 5.0);
  std::bernoulli_distribution flag(0.2);
  std::vector<ActionTriplet> out;
  int frame = 0;
  for (std::size_t i = count(rng); i > 0; --i) {
    frame += gap(rng);
    const int n = len(rng);
    out.push_back({frame / 50.0, (frame + n) / 50.0, kLabels[pick(rng)], score(rng), flag(rng)});
    frame += n;
  }
  if (end_out) *end_out = (frame + gap(rng)) / 50.0;
  return out;
}

TEST(Triplet, ValidationAndOrdering) {
  EXPECT_KINESIS_ERROR(validate(ActionTriplet{2.0, 1.0, "a", 1.0}), kSchemaViolation, EXPECT_EQ(err.subject(), "end_s"));
  EXPECT_KINESIS_ERROR(validate(ActionTriplet{0.0, 1.0, "a", 7.2}), kSchemaViolation, EXPECT_EQ(err.subject(), "score"));
  EXPECT_TRUE(is_ordered_disjoint({{0, 1, "a", 1}, {1, 2, "b", 1}}));
  EXPECT_FALSE(is_ordered_disjoint({{0, 1.5, "a", 1}, {1, 2, "b", 1}}));
}

TEST(Triplet, MatchingIsOneToOneAndLabelAware) {
  const std::vector<ActionTriplet> gold{{0, 10, "a", 1}, {12, 20, "b", 2}};
  const std::vector<ActionTriplet> pred{{1, 10, "a", 1}, {12, 19, "a", 2}, {0.5, 9, "a", 3}};
  const auto m = match_triplets(gold, pred);
  EXPECT_EQ(m.matched, 1u);
  EXPECT_EQ(m.gold_matched, (std::vector<bool>{true, false}));
  EXPECT_DOUBLE_EQ(m.recall(), 0.5);
}

TEST(AggregateStudent, Empty) {
  const auto s = aggregate_student("s1", {}, 60.0);
  EXPECT_TRUE(s.labels.empty());
  EXPECT_EQ(s.active_fraction, 0.0);
}

TEST(AggregateStudent, TwoTenSecondActions) {
  const auto s = aggregate_student("s1", {{0, 10, "a", 2}, {50, 60, "a", 4}}, 100.0);
  EXPECT_DOUBLE_EQ(s.active_fraction, 0.2);
  EXPECT_EQ(s.labels.at("a").count, 2u);
  EXPECT_DOUBLE_EQ(s.labels.at("a").mean_score, 3.0);
}

TEST(AggregateStudent, OutOfSessionTripletIsNamed) {
  EXPECT_KINESIS_ERROR(aggregate_student("s1", {{0, 10, "a", 2}, {50, 70, "a", 4}}, 60.0), kOutOfBounds,
                       EXPECT_EQ(err.subject(), "s1.triplets[1]"));
}

TEST(AggregateStudent, MatchesRecomputation) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    double duration = 0;
    const auto ts = random_triplets(rng, 12, &duration);
    const auto s = aggregate_student("x", ts, duration);
    double active = 0;
    for (const auto& label : kLabels) {
      std::size_t n = 0;
      double dur = 0, sc = 0;
      for (const auto& t : ts)
        if (t.label == label) {
          ++n;
          dur += t.end_s - t.start_s;
          sc += t.score;
        }
      active += dur;
      if (!n) {
        EXPECT_FALSE(s.labels.contains(label));
        continue;
      }
      EXPECT_EQ(s.labels.at(label).count, n);
      EXPECT_NEAR(s.labels.at(label).total_duration_s, dur, 1e-9);
      EXPECT_NEAR(s.labels.at(label).mean_score, sc / static_cast<double>(n), 1e-9);
    }
    EXPECT_NEAR(s.active_fraction, duration > 0 ? active / duration : 0.0, 1e-9);
  }
}

TEST(AggregateClass, SingleStudentEqualsStudent) {
  const auto s = aggregate_student("s1", {{0, 10, "a", 2}, {20, 25, "b", 4}}, 50.0);
  const auto c = aggregate_class({s});
  EXPECT_DOUBLE_EQ(c.aggregates.mean_active_fraction, s.active_fraction);
  EXPECT_DOUBLE_EQ(c.aggregates.labels.at("a").mean_score, 2.0);
  EXPECT_DOUBLE_EQ(c.aggregates.labels.at("b").mean_duration_s, 5.0);
}

TEST(AggregateClass, RankingAndDuplicates) {
  const auto a = aggregate_student("first", {{0, 80, "a", 2}}, 100.0);
  const auto b = aggregate_student("second", {{0, 20, "a", 2}}, 100.0);
  EXPECT_EQ(aggregate_class({b, a}).aggregates.participation_ranking, (std::vector<std::string>{"first", "second"}));
  EXPECT_KINESIS_ERROR(aggregate_class({a, a}), kDuplicateId, EXPECT_EQ(err.subject(), "first"));
}

TEST(AggregateClass, MatchesRecomputation) {
  Rng rng(2);
  std::vector<StudentStats> students;
  for (int i = 0; i < 10; ++i) {
    double duration = 0;
    auto ts = random_triplets(rng, 8, &duration);
    students.push_back(aggregate_student("s" + std::to_string(i), ts, duration));
  }
  const auto c = aggregate_class(students);
  double frac = 0;
  for (const auto& s : students) frac += s.active_fraction / 10.0;
  EXPECT_NEAR(c.aggregates.mean_active_fraction, frac, 1e-12);
  for (const auto& label : kLabels) {
    std::size_t n = 0;
    double count = 0, score = 0;
    for (const auto& s : students) {
      if (!s.labels.contains(label)) continue;
      ++n;
      count += static_cast<double>(s.labels.at(label).count);
      score += s.labels.at(label).mean_score;
    }
    if (!n) continue;
    EXPECT_EQ(c.aggregates.labels.at(label).students, n);
    EXPECT_NEAR(c.aggregates.labels.at(label).mean_count, count / static_cast<double>(n), 1e-12);
    EXPECT_NEAR(c.aggregates.labels.at(label).mean_score, score / static_cast<double>(n), 1e-12);
  }
  for (std::size_t i = 1; i < c.aggregates.participation_ranking.size(); ++i) {
    const auto find = [&](const std::string& id) {
      return std::find_if(students.begin(), students.end(), [&](auto& s) { return s.student_id == id; })->active_fraction;
    };
    EXPECT_GE(find(c.aggregates.participation_ranking[i - 1]), find(c.aggregates.participation_ranking[i]));
  }
}

TEST(Serialize, EmptyTimelineRoundTrips) {
  const Timeline t{"s1", 50.0, {}, 0.0};
  EXPECT_EQ(timeline_from_json(to_json(t)), t);
}

TEST(Serialize, RandomTimelinesRoundTripThroughText) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    double duration = 0;
    const Timeline t{"s" + std::to_string(i), 50.0, random_triplets(rng, 10, &duration), duration};
    ASSERT_EQ(timeline_from_json(json::parse(to_json(t).dump())), t);
  }
}

TEST(Serialize, ClassStatsRoundTripBitEqual) {
  Rng rng(4);
  std::vector<StudentStats> students;
  for (int i = 0; i < 5; ++i) {
    double duration = 0;
    auto ts = random_triplets(rng, 6, &duration);
    students.push_back(aggregate_student("s" + std::to_string(i), ts, duration));
  }
  const auto c = aggregate_class(students);
  test::TempDir dir;
  save_class_stats(dir / "c.json", c);
  EXPECT_EQ(load_class_stats(dir / "c.json"), c);
}

TEST(Serialize, CorruptedScoreNamesThePath) {
  auto j = to_json(Timeline{"s1", 50.0, {{0, 1, "a", 3.0}, {2, 3, "b", 4.0}}, 5.0});
  j["triplets"][1]["score"] = 7.2;
  EXPECT_KINESIS_ERROR(timeline_from_json(j), kSchemaViolation, EXPECT_EQ(err.subject(), "triplets[1].score"));
}

TEST(Serialize, MissingAndMistypedFieldsNameThePath) {
  auto j = to_json(Timeline{"s1", 50.0, {{0, 1, "a", 3.0}}, 0.0});
  j["triplets"][0].erase("label");
  EXPECT_KINESIS_ERROR(timeline_from_json(j), kSchemaViolation, EXPECT_EQ(err.subject(), "triplets[0].label"));
  j = to_json(Timeline{"s1", 50.0, {}, 0.0});
  j["rate_hz"] = "fast";
  EXPECT_KINESIS_ERROR(timeline_from_json(j), kSchemaViolation, EXPECT_EQ(err.subject(), "rate_hz"));
  j = to_json(Timeline{"s1", 50.0, {}, 0.0});
  j["schema"] = "other/1";
  EXPECT_KINESIS_ERROR(timeline_from_json(j), kSchemaViolation, EXPECT_EQ(err.subject(), "schema"));
}

TEST(Serialize, OverlappingTripletsAreRejected) {
  auto j = to_json(Timeline{"s1", 50.0, {{0, 2, "a", 3.0}, {2, 3, "b", 4.0}}, 0.0});
  j["triplets"][1]["start_s"] = 1.0;
  EXPECT_KINESIS_ERROR(timeline_from_json(j), kSchemaViolation, {});
}

recog::EncoderArch tiny_encoder() {
  recog::EncoderArch a;
  a.width = 16;
  a.heads = 2;
  a.ffn = 32;
  a.layers = 1;
  a.max_frames = 200;
  a.dim = 8;
  return a;
}

ModelSet tiny_models(float head_bias) {
  motion::Detector detector(motion::DetectorArch{1, 4}, 1);
  detector.head().weight().mutable_value().setZero();
  detector.head().bias().mutable_value().setConstant(head_bias);
  detector.set_window({50, 25});
  quality::ScorerArch sa;
  sa.embedding_dim = 8;
  return {detector, recog::SignalEncoder(tiny_encoder(), 2), recog::TextEmbeddingProvider::seeded(3, 8),
          quality::Scorer(sa, 4), recog::LabelSet(kLabels)};
}

signal::SignalSequence noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  signal::Frames f(static_cast<Eigen::Index>(n), signal::kChannels);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = g(rng);
  return signal::SignalSequence::from_frames(50.0, f);
}

TEST(Analyze, StationaryDetectorYieldsNothing) {
  EXPECT_TRUE(analyze_sequence(tiny_models(-20.0f), noise(400, 1), AnalyzeConfig{}).empty());
}

TEST(Analyze, AlwaysMovingDetectorYieldsOneScoredTriplet) {
  const auto models = tiny_models(20.0f);
  const auto out = analyze_sequence(models, noise(400, 2), AnalyzeConfig{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].start_s, 0.0);
  EXPECT_DOUBLE_EQ(out[0].end_s, 8.0);
  EXPECT_TRUE(models.labels.contains(out[0].label));
  EXPECT_GE(out[0].score, 0.0);
  EXPECT_LE(out[0].score, 5.0);
  EXPECT_EQ(out, analyze_sequence(models, noise(400, 2), AnalyzeConfig{}));
}

TEST(Analyze, ManyMatchesSequential) {
  const auto models = tiny_models(20.0f);
  std::vector<signal::SignalSequence> seqs;
  for (std::uint64_t i = 0; i < 5; ++i) seqs.push_back(noise(100 + 50 * i, i));
  const auto many = analyze_many(models, seqs, AnalyzeConfig{}, 3);
  for (std::size_t i = 0; i < seqs.size(); ++i) EXPECT_EQ(many[i], analyze_sequence(models, seqs[i], AnalyzeConfig{}));
}

TEST(Analyze, IncompatibleModelsAreRejectedUpFront) {
  auto models = tiny_models(0.0f);
  quality::ScorerArch wide;
  wide.embedding_dim = 16;
  models.scorer = quality::Scorer(wide, 1);
  EXPECT_KINESIS_ERROR(analyze_sequence(models, noise(100, 1), AnalyzeConfig{}), kIncompatibleModel, {});
  models = tiny_models(0.0f);
  models.provider = recog::TextEmbeddingProvider::seeded(3, 16);
  EXPECT_KINESIS_ERROR(analyze_sequence(models, noise(100, 1), AnalyzeConfig{}), kIncompatibleModel, {});
  models = tiny_models(0.0f);
  const auto slow = signal::SignalSequence::from_frames(25.0, noise(100, 1).frames());
  EXPECT_KINESIS_ERROR(analyze_sequence(models, slow, AnalyzeConfig{}), kIncompatibleModel,
                       EXPECT_EQ(err.subject(), "rate"));
}

TEST(Analyze, MarginRuleFlagsLowConfidence) {
  const auto models = tiny_models(20.0f);
  AnalyzeConfig cfg;
  cfg.min_margin = 2.0;  // cosine margins never exceed 2
  const auto out = analyze_sequence(models, noise(300, 3), cfg);
  ASSERT_FALSE(out.empty());
  for (const auto& t : out) EXPECT_TRUE(t.low_confidence);
}

}  // namespace
}  // namespace kinesis::pipeline

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "kinesis/recog/contrastive.hpp"
#include "kinesis/recog/encoder.hpp"
#include "kinesis/recog/labels.hpp"
#include "kinesis/recog/metrics.hpp"
#include "kinesis/recog/text_provider.hpp"
#include "kinesis/synth/waveform.hpp"
#include "test_util.hpp"

namespace kinesis::recog {
namespace {

EncoderArch small_arch(int dim = 16) {
  EncoderArch a;
  a.patch = 10;
  a.width = 32;
  a.heads = 2;
  a.ffn = 64;
  a.layers = 2;
  a.max_frames = 300;
  a.dim = dim;
  return a;
}

Eigen::MatrixXd random_segment(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, 6);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

std::vector<LabeledSegment> clips(const std::vector<std::string>& labels, std::size_t per, std::uint64_t seed,
                                  std::size_t max_frames = 200) {
  synth::ClipSetConfig cfg;
  cfg.per_label = per;
  cfg.seed = seed;
  cfg.max_frames = max_frames;
  std::vector<LabeledSegment> out;
  for (auto& c : synth::make_labeled_clips(labels, cfg)) out.push_back({std::move(c.frames), c.label});
  return out;
}

TEST(Classify, SelfSimilarity) {
  const LabelSet labels({"a", "b"});
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, -1, 0, 1;
  const auto c = classify(m.row(0).transpose(), m, labels);
  EXPECT_EQ(c.index, 0u);
  EXPECT_NEAR(c.similarities[0], 1.0, 1e-12);
}

TEST(Classify, HandComputedCosines) {
  const LabelSet labels({"e1", "e2", "e3"});
  Eigen::MatrixXd m(3, 2);
  m << 1, 0, 0, 1, 0.6, 0.8;
  const auto c = classify(Eigen::Vector2d(0.8, 0.6), m, labels);
  EXPECT_EQ(c.label, "e3");
  EXPECT_NEAR(c.similarities[0], 0.8, 1e-9);
  EXPECT_NEAR(c.similarities[1], 0.6, 1e-9);
  EXPECT_NEAR(c.similarities[2], 0.96, 1e-9);
  EXPECT_NEAR(top_margin(c), 0.16, 1e-9);
}

TEST(Classify, TieGoesToLowerIndex) {
  const LabelSet labels({"x", "y"});
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, 1;
  EXPECT_EQ(classify(Eigen::Vector2d(1, 1), m, labels).index, 0u);
}

TEST(Classify, DimensionMismatch) {
  const LabelSet labels({"x"});
  EXPECT_KINESIS_ERROR(classify(Eigen::Vector3d(1, 0, 0), Eigen::MatrixXd::Ones(1, 2), labels), kDimensionMismatch,
                       {});
}

TEST(LabelSetTest, DuplicateAndUnknown) {
  EXPECT_KINESIS_ERROR(LabelSet({"a", "a"}), kDuplicateId, EXPECT_EQ(err.subject(), "a"));
  EXPECT_KINESIS_ERROR(LabelSet({"a"}).index_of("z"), kUnknownLabel, EXPECT_EQ(err.subject(), "z"));
}

TEST(TextProvider, SeededIsStableAndUnit) {
  const auto p = TextEmbeddingProvider::seeded(42, 32);
  const LabelSet labels({"dribbling"});
  const auto a = p.embed_labels(labels);
  EXPECT_EQ(a.rows(), 1);
  EXPECT_EQ(a.cols(), 32);
  EXPECT_EQ(a, TextEmbeddingProvider::seeded(42, 32).embed_labels(labels));
  EXPECT_NEAR(a.row(0).norm(), 1.0, 1e-12);
  EXPECT_NE(a, TextEmbeddingProvider::seeded(43, 32).embed_labels(labels));
}

TEST(TextProvider, TableRoundTripAndMissingLabel) {
  test::TempDir dir;
  const auto p = TextEmbeddingProvider::seeded(7, 8);
  const LabelSet labels({"run", "walk"});
  p.save_table(dir / "t.tsv", labels);
  const auto t = TextEmbeddingProvider::from_table(dir / "t.tsv");
  EXPECT_LE((t.embed_labels(labels) - p.embed_labels(labels)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_KINESIS_ERROR(t.embed("jump"), kUnknownLabel, EXPECT_EQ(err.subject(), "jump"));
}

TEST(TextProvider, MalformedTableNamesTheLine) {
  test::TempDir dir;
  const auto path = dir.write("bad.tsv", "2 2\nrun\t1,0\nwalk\t1\n");
  EXPECT_KINESIS_ERROR(TextEmbeddingProvider::from_table(path), kParse,
                       EXPECT_NE(err.subject().find(":3"), std::string::npos));
}

TEST(Encoder, EmbeddingsAreUnitAndPure) {
  const SignalEncoder enc(small_arch(), 1);
  Rng rng(2);
  for (int i = 0; i < 5; ++i) {
    const auto seg = random_segment(37 + 20 * i, rng);
    const auto e = enc.embed(seg);
    EXPECT_NEAR(e.norm(), 1.0, 1e-6);
    EXPECT_EQ(e, enc.embed(seg));
  }
}

TEST(Encoder, PaddingBeyondValidLengthIsIgnored) {
  const SignalEncoder enc(small_arch(), 1);
  Rng rng(3);
  const auto seg = random_segment(73, rng);
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(120, 6);
  padded.topRows(73) = seg;
  padded.bottomRows(47).setConstant(9.0);
  EXPECT_LE((enc.embed(seg) - enc.embed(padded, 73)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Encoder, ChannelMismatch) {
  const SignalEncoder enc(small_arch(), 1);
  EXPECT_KINESIS_ERROR(enc.embed(Eigen::MatrixXd::Zero(20, 5)), kDimensionMismatch, {});
}

TEST(Encoder, SaveLoadRoundTrip) {
  test::TempDir dir;
  SignalEncoder enc(small_arch(), 5);
  enc.inject_lora({4, 0.0, true, true, 1});
  save_encoder(dir / "e.ckpt", enc);
  const auto back = load_encoder(dir / "e.ckpt");
  EXPECT_EQ(back.parameters_hash(), enc.parameters_hash());
  EXPECT_TRUE(back.has_lora());
}

TEST(Lora, FreshAdaptersAreIdentity) {
  const SignalEncoder base(small_arch(), 1);
  SignalEncoder adapted = base;
  adapted.inject_lora({8, 0.0, true, true, 3});
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    const auto seg = random_segment(60 + 13 * i, rng);
    EXPECT_EQ(base.embed(seg), adapted.embed(seg));
  }
  EXPECT_EQ(base.base_hash(), adapted.base_hash());
}

TEST(Lora, TrainableCountFormula) {
  EncoderArch arch = small_arch();
  arch.width = 64;
  arch.layers = 1;
  SignalEncoder enc(arch, 1);
  enc.inject_lora({4, 0.0, true, false, 0});
  EXPECT_EQ(enc.trainable_count(), 4u * (64 + 64));
}

TEST(Lora, BaseIsFrozenAfterInjection) {
  SignalEncoder enc(small_arch(), 1);
  enc.inject_lora({4, 0.0, true, true, 0});
  EXPECT_KINESIS_ERROR(enc.projection().weight().mutable_value(), kFrozenParameter, {});
}

TEST(Lora, RankTooLarge) {
  SignalEncoder enc(small_arch(), 1);
  EXPECT_KINESIS_ERROR(enc.inject_lora({33, 0.0, true, true, 0}), kRankTooLarge, {});
}

TEST(Lora, MergeOfZeroAdaptersEqualsBase) {
  const SignalEncoder base(small_arch(), 1);
  SignalEncoder enc = base;
  enc.inject_lora({4, 0.0, true, true, 0});
  enc.merge_lora();
  EXPECT_FALSE(enc.has_lora());
  Rng rng(6);
  const auto seg = random_segment(80, rng);
  EXPECT_EQ(enc.embed(seg), base.embed(seg));
  EXPECT_KINESIS_ERROR(enc.merge_lora(), kNoAdapters, {});
}

TEST(Lora, MergeOfTrainedAdaptersPreservesEmbeddings) {
  SignalEncoder enc(small_arch(), 1);
  enc.inject_lora({4, 0.0, true, true, 2});
  Rng rng(7);
  std::normal_distribution<float> g(0.0f, 0.05f);
  for (auto* p : enc.parameters()) {
    if (p->frozen()) continue;
    for (Eigen::Index i = 0; i < p->size(); ++i) p->mutable_value().data()[i] += g(rng);
  }
  SignalEncoder merged = enc;
  merged.merge_lora();
  for (int i = 0; i < 20; ++i) {
    const auto seg = random_segment(50 + 10 * i, rng);
    EXPECT_LE((merged.embed(seg) - enc.embed(seg)).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(Contrastive, InfoNceGradientMatchesFiniteDifferences) {
  Rng rng(9);
  std::normal_distribution<double> g;
  Eigen::MatrixXd s(5, 4), t(5, 4);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    s.data()[i] = g(rng);
    t.data()[i] = g(rng);
  }
  const std::vector<std::size_t> ids{0, 1, 0, 2, 1};
  Eigen::MatrixXd grad;
  symmetric_infonce(s, t, ids, 0.5, &grad);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    Eigen::MatrixXd up = s, down = s;
    up.data()[i] += h;
    down.data()[i] -= h;
    const double fd = (symmetric_infonce(up, t, ids, 0.5, nullptr) - symmetric_infonce(down, t, ids, 0.5, nullptr)) / (2 * h);
    EXPECT_NEAR(grad.data()[i], fd, 1e-6);
  }
}

TEST(Contrastive, ZeroEpochsLeaveParameters) {
  const auto provider = TextEmbeddingProvider::seeded(1, 16);
  const SignalEncoder enc(small_arch(), 2);
  ContrastiveConfig cfg;
  cfg.epochs = 0;
  const auto out = pretrain_contrastive(enc, clips({"walking", "sitting"}, 4, 1), provider, cfg);
  EXPECT_EQ(out.parameters_hash(), enc.parameters_hash());
}

TEST(Contrastive, UncoveredLabelIsNamed) {
  test::TempDir dir;
  TextEmbeddingProvider::seeded(1, 16).save_table(dir / "t.tsv", LabelSet({"walking"}));
  const auto table = TextEmbeddingProvider::from_table(dir / "t.tsv");
  EXPECT_KINESIS_ERROR(pretrain_contrastive(SignalEncoder(small_arch(), 2), clips({"walking", "sitting"}, 2, 1), table,
                                            ContrastiveConfig{}),
                       kUnknownLabel, EXPECT_EQ(err.subject(), "sitting"));
}

TEST(Contrastive, ThreeClassPretrainingSeparatesClasses) {
  const auto provider = TextEmbeddingProvider::seeded(3, 16);
  const std::vector<std::string> names{"walking", "sitting", "jumping"};
  const LabelSet labels(names);
  const auto before = provider.hash();
  ContrastiveConfig cfg;
  cfg.epochs = 8;
  cfg.batch_size = 16;
  cfg.seed = 4;
  const auto enc = pretrain_contrastive(SignalEncoder(small_arch(), 2), clips(names, 30, 1), provider, cfg);
  EXPECT_GE(eval_recognition(enc, provider, clips(names, 10, 2), labels).accuracy, 0.90);
  EXPECT_EQ(provider.hash(), before);
}

TEST(FineTune, RequiresAdaptersAndFullClasses) {
  const auto provider = TextEmbeddingProvider::seeded(3, 16);
  const LabelSet labels({"walking", "sitting"});
  const auto data = clips({"walking", "sitting"}, 2, 1);
  EXPECT_KINESIS_ERROR(finetune_kshot(SignalEncoder(small_arch(), 2), data, labels, 2, provider, ContrastiveConfig{}),
                       kNoAdapters, {});
  SignalEncoder enc(small_arch(), 2);
  enc.inject_lora({4, 0.0, true, true, 0});
  std::vector<LabeledSegment> short_data(data.begin(), data.begin() + 3);
  EXPECT_KINESIS_ERROR(finetune_kshot(enc, short_data, labels, 2, provider, ContrastiveConfig{}), kClassDeficit, {});
}

TEST(FineTune, BaseHashUnchanged) {
  const auto provider = TextEmbeddingProvider::seeded(3, 16);
  const LabelSet labels({"walking", "sitting"});
  SignalEncoder enc(small_arch(), 2);
  enc.inject_lora({4, 0.0, true, true, 0});
  ContrastiveConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  const auto tuned = finetune_kshot(enc, take_kshot(clips({"walking", "sitting"}, 4, 1), labels, 4), labels, 4,
                                    provider, cfg);
  EXPECT_EQ(tuned.base_hash(), enc.base_hash());
  EXPECT_NE(tuned.parameters_hash(), enc.parameters_hash());
}

TEST(Metrics, PerfectPredictions) {
  const LabelSet labels({"a", "b", "c"});
  const std::vector<std::size_t> gold{0, 1, 2, 2};
  const auto r = score_predictions(gold, gold, labels);
  EXPECT_EQ(r.accuracy, 1.0);
  for (const auto& c : r.classes) EXPECT_EQ(c.f1, 1.0);
}

TEST(Metrics, MatchConfusionOracle) {
  const LabelSet labels({"a", "b", "c", "d", "e", "f"});
  Rng rng(10);
  std::uniform_int_distribution<std::size_t> u(0, 5);
  std::vector<std::size_t> gold(600), pred(600);
  for (std::size_t i = 0; i < 600; ++i) {
    gold[i] = u(rng);
    pred[i] = u(rng);
  }
  const auto r = score_predictions(gold, pred, labels);
  std::size_t right = 0;
  double macro = 0.0;
  for (std::size_t c = 0; c < 6; ++c) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < 600; ++i) {
      tp += gold[i] == c && pred[i] == c;
      fp += gold[i] != c && pred[i] == c;
      fn += gold[i] == c && pred[i] != c;
    }
    right += tp;
    const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double rc = static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double f1 = 2 * p * rc / (p + rc);
    EXPECT_NEAR(r.classes[c].f1, f1, 1e-12);
    EXPECT_EQ(r.confusion[c][c], tp);
    macro += f1 / 6.0;
  }
  EXPECT_NEAR(r.accuracy, static_cast<double>(right) / 600.0, 1e-12);
  EXPECT_NEAR(r.macro_f1, macro, 1e-12);
}

TEST(SegmentsOnDisk, RoundTripAndBadManifest) {
  test::TempDir dir;
  const auto data = clips({"walking"}, 2, 1);
  const auto manifest = save_labeled_segments(dir.path(), data);
  const auto back = load_labeled_segments(manifest);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].label, "walking");
  EXPECT_LE((back[1].frames - data[1].frames).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_KINESIS_ERROR(load_labeled_segments(dir / "nope.csv"), kMissingArtifact, {});
}

}  // namespace
}  // namespace kinesis::recog

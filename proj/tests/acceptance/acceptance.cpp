// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is nonzero when any criterion fails.

#include <CLI11.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <set>

#include "kinesis/common/error.hpp"
#include "kinesis/common/rng.hpp"
#include "kinesis/motion/detector.hpp"
#include "kinesis/motion/metrics.hpp"
#include "kinesis/pipeline/analyze.hpp"
#include "kinesis/pipeline/serialize.hpp"
#include "kinesis/pipeline/stats.hpp"
#include "kinesis/quality/scorer.hpp"
#include "kinesis/recog/contrastive.hpp"
#include "kinesis/recog/metrics.hpp"
#include "kinesis/report/llm_client.hpp"
#include "kinesis/report/prompt.hpp"
#include "kinesis/report/report.hpp"
#include "kinesis/report/template.hpp"
#include "kinesis/signal/window.hpp"
#include "kinesis/synth/generator.hpp"
#include "kinesis/synth/session.hpp"
#include "kinesis/synth/waveform.hpp"

namespace {

using namespace kinesis;
using Clock = std::chrono::steady_clock;

struct Options {
  std::size_t md_train = 5000;
  std::size_t md_test = 1000;
  std::size_t md_epochs = 3;
  std::size_t pretrain_per_label = 40;
  std::size_t pretrain_epochs = 10;
  std::size_t finetune_epochs = 30;
  std::size_t test_per_label = 25;
  std::size_t aqa_samples = 1000;
  std::size_t aqa_epochs = 200;
  std::string fixtures = KINESIS_FIXTURE_DIR;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  Outcome outcome;
  double seconds = 0.0;
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void progress(const std::string& msg) { std::cerr << "[acceptance] " << msg << std::endl; }

// ---------------------------------------------------------------- 1

// Value reported at position k of a window starting at s. Integer-valued so
// every partial sum is exact regardless of contraction or ordering.
double probe(double s, std::size_t k) { return 64.0 * s + static_cast<double>(k); }

Outcome window_coverage() {
  std::size_t configs = 0;
  for (std::size_t n = 1; n <= 64; ++n)
    for (std::size_t len = 1; len <= 16; ++len)
      for (std::size_t step = 1; step <= len; ++step) {
        ++configs;
        const signal::WindowConfig cfg{len, step};
        const auto spans = signal::slice_windows(n, cfg);
        std::vector<std::size_t> cover(n, 0);
        std::vector<double> sum(n, 0.0);
        for (const auto& w : spans)
          for (std::size_t f = w.start; f < w.start + w.valid; ++f) {
            ++cover[f];
            sum[f] += probe(static_cast<double>(w.start), f - w.start);
          }
        if (signal::coverage_counts(n, cfg) != cover)
          return {false, fmt::format("coverage mismatch at N={} L_w={} L_s={}", n, len, step)};

        signal::Frames frames = signal::Frames::Zero(static_cast<Eigen::Index>(n), signal::kChannels);
        for (std::size_t f = 0; f < n; ++f) frames(static_cast<Eigen::Index>(f), 0) = static_cast<double>(f);
        const auto avg = motion::average_window_predictions(frames, cfg, [](const std::vector<signal::Frames>& ws) {
          std::vector<std::vector<double>> out;
          for (const auto& w : ws) {
            std::vector<double> p(static_cast<std::size_t>(w.rows()));
            for (std::size_t k = 0; k < p.size(); ++k) p[k] = probe(w(0, 0), k);
            out.push_back(std::move(p));
          }
          return out;
        });
        for (std::size_t f = 0; f < n; ++f) {
          if (cover[f] == 0) return {false, fmt::format("frame {} uncovered at N={} L_w={} L_s={}", f, n, len, step)};
          if (avg.counts[f] != cover[f] || avg.values[f] != sum[f] / static_cast<double>(cover[f]))
            return {false, fmt::format("averaging mismatch at N={} L_w={} L_s={} frame {}", n, len, step, f)};
        }
        // Quarter-step grids cover every interior frame exactly four times.
        if (len % 4 == 0 && step == len / 4 && n >= len && (n - len) % step == 0) {
          for (std::size_t f = len - step; f < n - len + step; ++f)
            if (cover[f] != 4)
              return {false, fmt::format("interior frame {} covered {} times at N={} L_w={}", f, cover[f], n, len)};
        }
      }

  // Same check through a real detector's batched inference.
  motion::Detector det(motion::DetectorArch{1, 8}, 7);
  Rng rng(1);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (std::size_t n : {5u, 17u, 40u, 64u})
    for (std::size_t len : {4u, 8u, 16u})
      for (std::size_t step : {len / 4, len / 2, len}) {
        signal::Frames f(static_cast<Eigen::Index>(n), signal::kChannels);
        for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = g(rng);
        const signal::WindowConfig cfg{len, step};
        const auto got = motion::detect(det, signal::SignalSequence::from_frames(50.0, f), cfg);
        std::vector<double> sum(n, 0.0);
        std::vector<std::size_t> cnt(n, 0);
        for (const auto& w : signal::slice_windows(n, cfg)) {
          const auto p = det.predict_window(signal::extract_window(f, w, len));
          for (std::size_t k = 0; k < w.valid; ++k) {
            sum[w.start + k] += p[k];
            ++cnt[w.start + k];
          }
        }
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(got.values[i] - sum[i] / static_cast<double>(cnt[i])));
      }
  if (worst > 1e-6) return {false, fmt::format("detector averaging deviates by {:.2e}", worst)};
  return {true, fmt::format("{} grid configurations exact; detector batched vs per-window max dev {:.1e}", configs, worst)};
}

// ---------------------------------------------------------------- 2, 3

struct MotionModels {
  motion::Detector detector;
  synth::LabeledSegmentPool pool;
};

synth::BinaryPartition motion_partition() {
  synth::BinaryPartition part;
  const auto& motion = synth::kuhar_style_motion_labels();
  for (const auto& l : synth::kuhar_style_labels())
    (std::find(motion.begin(), motion.end(), l) != motion.end() ? part.motion : part.stationary).insert(l);
  return part;
}

double detection_f1(const motion::Detector& det, const synth::MotionDataset& test, std::size_t divisor) {
  const auto cfg = signal::WindowConfig::with_overlap(det.window().length, divisor);
  std::vector<synth::MotionMask> preds;
  for (const auto& s : test.signals) {
    const auto p = motion::detect(det, s, cfg);
    synth::MotionMask m(p.values.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = p.values[i] >= 0.5;
    preds.push_back(std::move(m));
  }
  return motion::eval_detection(preds, test.masks).frames.f1;
}

std::pair<Outcome, Outcome> motion_detection(const Options& opt, MotionModels& out) {
  out.pool = synth::make_parametric_pool(synth::kuhar_style_labels(), 20, 100, 1500, 7);
  const auto binary = synth::relabel_binary(out.pool, motion_partition());
  synth::SynthConfig sc;
  sc.seed = 1;
  const auto train = synth::synthesize_dataset(binary, sc, opt.md_train);
  sc.seed = 2;
  const auto test = synth::synthesize_dataset(binary, sc, opt.md_test);
  motion::DetectorTrainConfig tc;
  tc.epochs = opt.md_epochs;
  tc.seed = 3;
  tc.window = signal::WindowConfig::with_overlap(300, 4);
  const auto t0 = Clock::now();
  out.detector = motion::train_detector(train.signals, train.masks, tc);
  progress(fmt::format("detector trained on {} sequences x {} epochs in {:.0f} s", opt.md_train, opt.md_epochs, since(t0)));
  const double f1_quarter = detection_f1(out.detector, test, 4);
  const double f1_half = detection_f1(out.detector, test, 2);
  const double f1_full = detection_f1(out.detector, test, 1);
  Outcome c2{f1_quarter >= 0.85 && opt.md_epochs <= 20,
             fmt::format("F1 {:.4f} at step L_w/4 (threshold 0.85, {} train / {} test, {} epochs)", f1_quarter,
                         opt.md_train, opt.md_test, opt.md_epochs)};
  Outcome c3{f1_quarter >= f1_full,
             fmt::format("F1 {:.4f} / {:.4f} / {:.4f} at step 1/4, 1/2, 1 of L_w", f1_quarter, f1_half, f1_full)};
  return {c2, c3};
}

// ---------------------------------------------------------------- 4

Outcome classify_oracle() {
  Rng rng(4);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> dim(2, 64), count(1, 20);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = dim(rng), m = count(rng);
    Eigen::VectorXd f(d);
    Eigen::MatrixXd labels(m, d);
    for (auto& x : f) x = g(rng);
    for (Eigen::Index i = 0; i < labels.size(); ++i) labels.data()[i] = g(rng);
    std::vector<std::string> names;
    for (int i = 0; i < m; ++i) names.push_back("c" + std::to_string(i));
    const recog::LabelSet set(names);
    const auto c = recog::classify(f, labels, set);

    double fn = 0;
    for (int k = 0; k < d; ++k) fn += f[k] * f[k];
    fn = std::sqrt(fn);
    std::size_t best = 0;
    double best_sim = -2;
    for (int i = 0; i < m; ++i) {
      double dot = 0, rn = 0;
      for (int k = 0; k < d; ++k) {
        dot += f[k] * labels(i, k);
        rn += labels(i, k) * labels(i, k);
      }
      const double sim = dot / (fn * std::sqrt(rn));
      worst = std::max(worst, std::abs(sim - c.similarities[static_cast<std::size_t>(i)]));
      if (sim > best_sim) {
        best_sim = sim;
        best = static_cast<std::size_t>(i);
      }
    }
    if (c.index != best) return {false, fmt::format("instance {}: argmax {} vs oracle {}", trial, c.index, best)};

    Eigen::MatrixXd scaled = labels;
    for (int i = 0; i < m; ++i) scaled.row(i) *= scale(rng);
    if (recog::classify(f * scale(rng), scaled, set).index != c.index)
      return {false, fmt::format("instance {}: argmax changed under positive rescaling", trial)};
  }
  if (worst > 1e-9) return {false, fmt::format("max cosine deviation {:.2e}", worst)};
  return {true, fmt::format("1000 instances, max cosine deviation {:.1e}, argmax rescale-invariant", worst)};
}

// ---------------------------------------------------------------- 5, 6

std::vector<recog::LabeledSegment> segments(const std::vector<std::string>& labels, std::size_t per,
                                            std::size_t min_frames, std::size_t max_frames, std::uint64_t seed) {
  synth::ClipSetConfig cfg;
  cfg.per_label = per;
  cfg.min_frames = min_frames;
  cfg.max_frames = max_frames;
  cfg.seed = seed;
  std::vector<recog::LabeledSegment> out;
  for (auto& c : synth::make_labeled_clips(labels, cfg)) out.push_back({std::move(c.frames), c.label});
  return out;
}

struct RecogModels {
  recog::TextEmbeddingProvider provider = recog::TextEmbeddingProvider::seeded(42);
  recog::SignalEncoder pretrained;
  recog::SignalEncoder tuned;  // K = 16, r = 32
  recog::LabelSet labels{synth::pe_class_labels()};
};

recog::LoraConfig lora32() {
  recog::LoraConfig lc;
  lc.rank = 32;
  lc.seed = 9;
  return lc;
}

Outcome few_shot(const Options& opt, RecogModels& m) {
  recog::ContrastiveConfig pc;
  pc.epochs = opt.pretrain_epochs;
  pc.seed = 5;
  auto t0 = Clock::now();
  m.pretrained = recog::pretrain_contrastive(recog::SignalEncoder(recog::EncoderArch{}, 3),
                                             segments(synth::pretraining_labels(), opt.pretrain_per_label, 100, 200, 1),
                                             m.provider, pc);
  progress(fmt::format("encoder pretrained in {:.0f} s", since(t0)));
  const auto test = segments(synth::pe_class_labels(), opt.test_per_label, 100, 600, 77);
  const auto shots = segments(synth::pe_class_labels(), 16, 100, 600, 55);
  const double zero_shot = recog::eval_recognition(m.pretrained, m.provider, test, m.labels).accuracy;

  std::vector<double> acc;
  for (std::size_t k : {2, 4, 8, 16}) {
    t0 = Clock::now();
    auto enc = m.pretrained;
    enc.inject_lora(lora32());
    recog::ContrastiveConfig fc;
    fc.epochs = opt.finetune_epochs;
    fc.seed = 11;
    fc.batch_size = 16;
    enc = recog::finetune_kshot(enc, recog::take_kshot(shots, m.labels, k), m.labels, k, m.provider, fc);
    acc.push_back(recog::eval_recognition(enc, m.provider, test, m.labels).accuracy);
    progress(fmt::format("K={} accuracy {:.3f} ({:.0f} s)", k, acc.back(), since(t0)));
    if (k == 16) m.tuned = enc;
  }
  const bool monotone = std::is_sorted(acc.begin(), acc.end());
  return {monotone && acc.back() >= 0.90,
          fmt::format("zero-shot {:.3f}; K=2/4/8/16 -> {:.3f} / {:.3f} / {:.3f} / {:.3f} (r=32, need non-decreasing and "
                      "K=16 >= 0.90)",
                      zero_shot, acc[0], acc[1], acc[2], acc[3])};
}

Outcome lora_identity(const RecogModels& m) {
  auto adapted = m.pretrained;
  adapted.inject_lora(lora32());
  Rng rng(6);
  std::uniform_int_distribution<int> len(20, 1500);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    Eigen::MatrixXd seg(len(rng), 6);
    for (Eigen::Index k = 0; k < seg.size(); ++k) seg.data()[k] = g(rng);
    if (adapted.embed(seg) != m.pretrained.embed(seg))
      return {false, fmt::format("segment {}: fresh adapters changed the embedding", i)};
  }
  if (m.tuned.base_hash() != m.pretrained.base_hash()) return {false, "base parameter hash changed by fine-tuning"};
  auto merged = m.tuned;
  merged.merge_lora();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Eigen::MatrixXd seg(len(rng), 6);
    for (Eigen::Index k = 0; k < seg.size(); ++k) seg.data()[k] = g(rng);
    worst = std::max(worst, (merged.embed(seg) - m.tuned.embed(seg)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-5, fmt::format("100 segments bit-identical with fresh adapters; base hash unchanged; merge "
                                     "max deviation {:.2e} (limit 1e-5)",
                                     worst)};
}

// ---------------------------------------------------------------- 7

double rms(const signal::Frames& f) {
  const Eigen::RowVectorXd mean = f.colwise().mean();
  return std::sqrt((f.rowwise() - mean).array().square().mean());
}

Outcome scorer_checks(const Options& opt, const RecogModels& m) {
  Rng rng(7);
  std::normal_distribution<double> g(0.0, 10.0);
  quality::ScorerArch small;
  small.embedding_dim = 16;
  for (int i = 0; i < 10000; ++i) {
    quality::Scorer s(small, static_cast<std::uint64_t>(i % 50));
    Eigen::VectorXd a(16), b(16);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    const double v = quality::score_segment(s, a * (1 + i % 7), b);
    if (!(v >= 0.0 && v <= 5.0)) return {false, fmt::format("score {} out of range", v)};
  }
  quality::Scorer zero(quality::ScorerArch{}, 1);
  for (auto* p : zero.parameters()) p->mutable_value().setZero();
  const double mid = quality::score_segment(zero, m.provider.embed("dribbling"), m.provider.embed("shooting"));
  if (mid != 2.5) return {false, fmt::format("zero-parameter score {} != 2.5", mid)};

  // Amplitude task: score is 5 x min-max normalised RMS of the centred clip.
  std::vector<quality::ScoredSample> all;
  Rng r2(9);
  std::uniform_real_distribution<double> amp(0.2, 1.0);
  const auto& labels = synth::pe_class_labels();
  for (std::size_t i = 0; i < opt.aqa_samples; ++i) {
    const auto& l = labels[i % labels.size()];
    all.push_back({"", synth::render(synth::signature_for(l), 150, 50.0, amp(r2), r2), l, 0.0});
  }
  double lo = 1e300, hi = -1e300;
  for (auto& s : all) {
    s.score = rms(s.frames);
    lo = std::min(lo, s.score);
    hi = std::max(hi, s.score);
  }
  for (auto& s : all) s.score = 5.0 * (s.score - lo) / (hi - lo);
  const auto split = all.begin() + static_cast<std::ptrdiff_t>(opt.aqa_samples * 4 / 5);
  const std::vector<quality::ScoredSample> train(all.begin(), split), test(split, all.end());
  quality::ScorerTrainConfig cfg;
  cfg.epochs = opt.aqa_epochs;
  cfg.seed = 3;
  const auto scorer = quality::train_scorer(train, m.pretrained, m.provider, cfg);
  const auto stats = quality::eval_scorer(scorer, test, m.pretrained, m.provider);
  double mean = 0.0;
  for (const auto& s : train) mean += s.score / static_cast<double>(train.size());
  double baseline = 0.0;
  for (const auto& s : test) baseline += (s.score - mean) * (s.score - mean) / static_cast<double>(test.size());
  return {stats.pearson >= 0.8 && stats.mse < baseline,
          fmt::format("10k scores in [0,5]; zero model 2.5; amplitude task Pearson {:.3f} (>= 0.8), MSE {:.3f} vs "
                      "mean baseline {:.3f}",
                      stats.pearson, stats.mse, baseline)};
}

// ---------------------------------------------------------------- 8

std::vector<std::string> session_reports(const pipeline::ModelSet& models, const synth::LabeledSegmentPool& pool,
                                         const std::vector<synth::SessionScript>& scripts, const Options& opt,
                                         std::vector<pipeline::Timeline>* predicted,
                                         std::vector<std::vector<pipeline::ActionTriplet>>* gold) {
  std::vector<signal::SignalSequence> signals;
  for (const auto& s : scripts) {
    auto sim = synth::simulate_class_session(s, pool, {50.0, 10, 2026});
    if (gold) gold->push_back(sim.triplets);
    signals.push_back(std::move(sim.signal));
  }
  const auto timelines = pipeline::analyze_many(models, signals, pipeline::AnalyzeConfig{});
  const auto tmpl = report::PromptTemplate::load(opt.fixtures + "/report_template.txt");
  const auto plan = report::load_lesson_plan(opt.fixtures + "/lesson_plan.json");
  const auto examples = report::load_examples(opt.fixtures + "/examples");
  report::MockClient client;
  std::vector<std::string> bodies;
  std::vector<pipeline::StudentStats> students;
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    const double duration = static_cast<double>(signals[i].size()) / signals[i].rate();
    students.push_back(pipeline::aggregate_student(scripts[i].student_id, timelines[i], duration));
    bodies.push_back(report::generate_report(client, report::build_individual_prompt(tmpl, plan, students.back(), examples),
                                             report::Audience::kStudent, scripts[i].student_id)
                         .body);
    if (predicted) predicted->push_back({scripts[i].student_id, 50.0, timelines[i], duration});
  }
  const auto cls = pipeline::aggregate_class(students);
  bodies.push_back(
      report::generate_report(client, report::build_class_prompt(tmpl, plan, cls, examples), report::Audience::kTeacher, "class")
          .body);
  return bodies;
}

Outcome end_to_end(const Options& opt, const MotionModels& md, const RecogModels& rm) {
  // Scorer for the fixture: clip scores drive the generator's amplitude.
  synth::ClipSetConfig cc;
  cc.per_label = 50;
  cc.min_frames = 100;
  cc.max_frames = 600;
  cc.seed = 4;
  std::vector<quality::ScoredSample> scored;
  for (auto& c : synth::make_scored_clips(synth::pe_class_labels(), cc)) scored.push_back({"", c.frames, c.label, c.score});
  quality::ScorerTrainConfig qc;
  qc.epochs = 100;
  qc.seed = 12;
  const auto scorer = quality::train_scorer(scored, rm.tuned, rm.provider, qc);
  const pipeline::ModelSet models{md.detector, rm.tuned, rm.provider, scorer, rm.labels};

  const auto scripts = synth::load_scripts(opt.fixtures + "/class_scripts.json");
  std::vector<pipeline::Timeline> predicted;
  std::vector<std::vector<pipeline::ActionTriplet>> gold;
  const auto first = session_reports(models, md.pool, scripts, opt, &predicted, &gold);
  const auto second = session_reports(models, md.pool, scripts, opt, nullptr, nullptr);

  std::size_t total = 0, matched = 0;
  bool ordered = true;
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    const auto m = pipeline::match_triplets(gold[i], predicted[i].triplets, 0.5);
    total += m.gold;
    matched += m.matched;
    ordered = ordered && pipeline::is_ordered_disjoint(predicted[i].triplets);
  }
  const double recall = total ? static_cast<double>(matched) / static_cast<double>(total) : 0.0;
  const bool identical = first == second && first.size() == scripts.size() + 1;
  return {recall >= 0.8 && ordered && identical,
          fmt::format("{}/{} gold triplets matched ({:.0f}%, need 80%); sorted+disjoint {}; {} mock reports "
                      "byte-identical across runs {}",
                      matched, total, 100 * recall, ordered ? "yes" : "no", first.size(), identical ? "yes" : "no")};
}

// ---------------------------------------------------------------- 9

const std::vector<std::string> kVocab{"dribbling", "shooting", "running", "catching and passing", "jumping"};

std::vector<pipeline::ActionTriplet> random_triplets(Rng& rng, std::size_t max_count, double& end) {
  std::uniform_int_distribution<std::size_t> count(0, max_count), pick(0, kVocab.size() - 1);
  std::uniform_int_distribution<int> gap(0, 300), len(1, 800);
  std::uniform_real_distribution<double> score(0.0, 5.0);
  std::bernoulli_distribution flag(0.25);
  std::vector<pipeline::ActionTriplet> out;
  int frame = 0;
  for (std::size_t i = count(rng); i > 0; --i) {
    frame += gap(rng);
    const int n = len(rng);
    out.push_back({frame / 50.0, (frame + n) / 50.0, kVocab[pick(rng)], score(rng), flag(rng)});
    frame += n;
  }
  end = (frame + 1 + gap(rng)) / 50.0;
  return out;
}

template <class F>
std::string violation_path(F&& read) {
  try {
    read();
  } catch (const Error& e) {
    return e.code() == ErrorCode::kSchemaViolation ? e.subject() : fmt::format("<{}>", to_string(e.code()));
  }
  return "<accepted>";
}

Outcome serialization() {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    double end = 0;
    auto ts = random_triplets(rng, 15, end);
    const pipeline::Timeline t{"s" + std::to_string(i), 50.0, ts, end};
    if (pipeline::timeline_from_json(nlohmann::json::parse(pipeline::to_json(t).dump())) != t)
      return {false, fmt::format("timeline {} changed in round trip", i)};
    std::vector<pipeline::StudentStats> students;
    const int n = 1 + i % 6;
    for (int k = 0; k < n; ++k) {
      auto st = random_triplets(rng, 8, end);
      students.push_back(pipeline::aggregate_student("s" + std::to_string(k), st, end));
    }
    const auto c = pipeline::aggregate_class(students);
    if (pipeline::class_stats_from_json(nlohmann::json::parse(pipeline::to_json(c).dump())) != c)
      return {false, fmt::format("class stats {} changed in round trip", i)};
  }

  double end = 0;
  std::vector<pipeline::ActionTriplet> ts;
  while (ts.size() < 3) ts = random_triplets(rng, 6, end);
  const auto base = pipeline::to_json(pipeline::Timeline{"s1", 50.0, ts, end});
  std::vector<pipeline::StudentStats> students;
  students.push_back(pipeline::aggregate_student("a", ts, end));
  students.push_back(pipeline::aggregate_student("b", ts, end));
  const auto cbase = pipeline::to_json(pipeline::aggregate_class(students));

  struct Case {
    std::string expected;
    std::function<void(nlohmann::json&)> corrupt;
    bool class_stats;
  };
  const std::vector<Case> cases{
      {"triplets[2].score", [](auto& j) { j["triplets"][2]["score"] = 7.2; }, false},
      {"triplets[0].end_s", [](auto& j) { j["triplets"][0]["end_s"] = -1.0; }, false},
      {"triplets[1].label", [](auto& j) { j["triplets"][1].erase("label"); }, false},
      {"triplets[1].low_confidence", [](auto& j) { j["triplets"][1]["low_confidence"] = "yes"; }, false},
      {"student_id", [](auto& j) { j["student_id"] = 3; }, false},
      {"rate_hz", [](auto& j) { j["rate_hz"] = -50; }, false},
      {"schema", [](auto& j) { j["schema"] = "kinesis.timeline/0"; }, false},
      {"students[1].triplets[2].score", [](auto& j) { j["students"][1]["triplets"][2]["score"] = -0.5; }, true},
      {"students[0].active_fraction", [](auto& j) { j["students"][0]["active_fraction"] = 1.5; }, true},
      {"class_aggregates.participation_ranking", [](auto& j) { j["class_aggregates"]["participation_ranking"] = 1; }, true},
  };
  for (const auto& c : cases) {
    auto j = c.class_stats ? cbase : base;
    c.corrupt(j);
    const auto got = c.class_stats ? violation_path([&] { pipeline::class_stats_from_json(j); })
                                   : violation_path([&] { pipeline::timeline_from_json(j); });
    if (got != c.expected) return {false, fmt::format("corrupted {} reported as {}", c.expected, got)};
  }
  return {true, fmt::format("1000 timeline and 1000 class-stats round trips lossless; {} corrupted fields named", cases.size())};
}

// ---------------------------------------------------------------- 10

std::size_t occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

Outcome prompt_inclusion(const Options& opt) {
  const auto tmpl = report::PromptTemplate::load(opt.fixtures + "/report_template.txt");
  const auto plan = report::load_lesson_plan(opt.fixtures + "/lesson_plan.json");
  std::size_t placeholders = 0;
  for (const auto& s : tmpl.sections()) placeholders += occurrences(s.body, "{{triplet_table}}");
  Rng rng(10);
  std::size_t checked = 0;
  for (int i = 0; i < 200; ++i) {
    double end = 0;
    const auto ts = random_triplets(rng, 30, end);
    const auto stats = pipeline::aggregate_student("s" + std::to_string(i), ts, end);
    const auto prompt = report::build_individual_prompt(tmpl, plan, stats, {});
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const auto row = report::format_triplet(k + 1, ts[k]);
      if (occurrences(prompt, row + "\n") != placeholders)
        return {false, fmt::format("fixture {}: row '{}' appears {} times", i, row, occurrences(prompt, row + "\n"))};
      ++checked;
    }
    if (occurrences(prompt, " s | ") != ts.size() * placeholders)
      return {false, fmt::format("fixture {}: row count differs from {}", i, ts.size())};
  }
  report::SlotMap slots;
  for (const auto& s : tmpl.slots()) slots[s] = "x";
  slots.erase("aggregates");
  try {
    report::render_prompt(tmpl, slots);
    return {false, "render succeeded with a missing slot"};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMissingSlot || e.subject() != "aggregates")
      return {false, fmt::format("missing slot reported as {} '{}'", to_string(e.code()), e.subject())};
  }
  return {true, fmt::format("{} triplet rows across 200 fixtures each present once per placeholder; missing slot "
                            "'aggregates' named",
                            checked)};
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"kinesis acceptance criteria"};
  app.add_option("--md-train", opt.md_train, "motion detection training sequences");
  app.add_option("--md-test", opt.md_test, "motion detection test sequences");
  app.add_option("--md-epochs", opt.md_epochs, "motion detection epochs (at most 20)");
  app.add_option("--pretrain-epochs", opt.pretrain_epochs, "contrastive pretraining epochs");
  app.add_option("--finetune-epochs", opt.finetune_epochs, "K-shot fine-tuning epochs");
  app.add_option("--fixtures", opt.fixtures, "directory with the bundled fixtures");
  CLI11_PARSE(app, argc, argv);

  std::vector<Criterion> results{{1, "window coverage and averaging oracle", {}},
                                 {2, "synthetic motion detection F1", {}},
                                 {3, "step-size ablation direction", {}},
                                 {4, "cosine classification oracle", {}},
                                 {5, "LoRA identity, freeze and merge", {}},
                                 {6, "few-shot accuracy trend", {}},
                                 {7, "quality score codomain and amplitude oracle", {}},
                                 {8, "three-student end-to-end fixture", {}},
                                 {9, "timeline and stats serialization", {}},
                                 {10, "prompt inclusion and missing slot", {}}};
  const auto run = [&](int id, const std::function<Outcome()>& fn) {
    auto& r = results[static_cast<std::size_t>(id - 1)];
    progress(fmt::format("criterion {}: {}", id, r.name));
    const auto t0 = Clock::now();
    try {
      r.outcome = fn();
    } catch (const std::exception& e) {
      r.outcome = {false, std::string("exception: ") + e.what()};
    }
    r.seconds += since(t0);
  };

  run(1, window_coverage);
  run(4, classify_oracle);
  run(9, serialization);
  run(10, [&] { return prompt_inclusion(opt); });

  MotionModels md;
  run(2, [&] {
    auto [c2, c3] = motion_detection(opt, md);
    results[2].outcome = c3;
    return c2;
  });
  results[2].seconds = results[1].seconds;

  RecogModels rm;
  run(6, [&] { return few_shot(opt, rm); });
  const bool have_encoder = rm.tuned.has_lora();
  run(5, [&] { return have_encoder ? lora_identity(rm) : Outcome{false, "no fine-tuned encoder"}; });
  run(7, [&] { return scorer_checks(opt, rm); });
  run(8, [&] {
    return have_encoder ? end_to_end(opt, md, rm) : Outcome{false, "no fine-tuned encoder"};
  });

  int failed = 0;
  for (const auto& r : results) {
    failed += r.outcome.pass ? 0 : 1;
    std::cout << fmt::format("{} {:>2} {} ({:.1f} s): {}\n", r.outcome.pass ? "PASS" : "FAIL", r.id, r.name, r.seconds,
                             r.outcome.detail);
  }
  std::cout << fmt::format("{}/{} criteria passed\n", results.size() - static_cast<std::size_t>(failed), results.size());
  return failed == 0 ? 0 : 1;
}

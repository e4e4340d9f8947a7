// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/pipeline/analyze.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "kinesis/common/error.hpp"

namespace kinesis::pipeline {

void to_json(nlohmann::json& j, const AnalyzeConfig& cfg) {
  j = {{"segments", cfg.segments}, {"confidence_floor", cfg.confidence_floor}, {"min_margin", cfg.min_margin}};
  if (cfg.window) j["window"] = {{"length", cfg.window->length}, {"step", cfg.window->step}};
}

void from_json(const nlohmann::json& j, AnalyzeConfig& cfg) {
  cfg = AnalyzeConfig{};
  if (j.contains("segments")) cfg.segments = j.at("segments").get<motion::SegmentConfig>();
  cfg.confidence_floor = j.value("confidence_floor", cfg.confidence_floor);
  cfg.min_margin = j.value("min_margin", cfg.min_margin);
  if (j.contains("window")) {
    signal::WindowConfig w;
    w.length = j.at("window").value("length", w.length);
    w.step = j.at("window").value("step", w.step);
    w.validate();
    cfg.window = w;
  }
}

void check_compatibility(const motion::Detector& detector, const recog::SignalEncoder& encoder,
                         const recog::TextEmbeddingProvider& provider, const quality::Scorer& scorer,
                         const recog::LabelSet& labels) {
  auto fail = [](const std::string& what, const std::string& subject) {
    throw Error(ErrorCode::kIncompatibleModel, what, subject);
  };
  if (detector.arch().input != static_cast<int>(signal::kChannels))
    fail(fmt::format("detector expects {} channels, signals carry {}", detector.arch().input, signal::kChannels),
         "detector");
  if (static_cast<std::size_t>(encoder.arch().dim) != provider.dim())
    fail(fmt::format("encoder width {} differs from text width {}", encoder.arch().dim, provider.dim()), "encoder");
  if (scorer.arch().embedding_dim != encoder.arch().dim)
    fail(fmt::format("scorer expects width {}, encoder emits {}", scorer.arch().embedding_dim, encoder.arch().dim),
         "scorer");
  if (labels.size() == 0) fail("empty label set", "labels");
  for (const auto& l : labels)
    if (!provider.covers(l)) fail(fmt::format("text embeddings lack label '{}'", l), l);
}

namespace {

std::vector<ActionTriplet> run(const motion::Detector& detector, const recog::SignalEncoder& encoder,
                               const quality::Scorer& scorer, const recog::LabelSet& labels, const Eigen::MatrixXd& label_matrix,
                               const signal::SignalSequence& seq, const AnalyzeConfig& cfg) {
  if (std::abs(seq.rate() - signal::kCanonicalRateHz) > 1e-9)
    throw Error(ErrorCode::kIncompatibleModel,
                fmt::format("signal at {} Hz, models run at {} Hz", seq.rate(), signal::kCanonicalRateHz), "rate");
  std::vector<ActionTriplet> out;
  if (seq.empty()) return out;

  const auto window = cfg.window.value_or(detector.window());
  const auto probs = motion::detect(detector, seq, window);
  const auto intervals = motion::extract_segments(probs.values, cfg.segments);
  const auto max_frames = static_cast<std::size_t>(encoder.arch().max_frames);
  const double rate = signal::kCanonicalRateHz;

  for (const auto& iv : intervals) {
    // Long segments are embedded from their central stretch.
    std::size_t begin = iv.begin, len = iv.length();
    if (len > max_frames) {
      begin += (len - max_frames) / 2;
      len = max_frames;
    }
    const Eigen::VectorXd emb = encoder.embed(seq.frames().middleRows(static_cast<Eigen::Index>(begin),
                                                                       static_cast<Eigen::Index>(len)));
    const auto cls = recog::classify(emb, label_matrix, labels);
    const double score = quality::score_segment(scorer, emb, label_matrix.row(cls.index).transpose());

    ActionTriplet t;
    t.start_s = static_cast<double>(iv.begin) / rate;
    t.end_s = static_cast<double>(iv.end) / rate;
    t.label = cls.label;
    t.score = std::clamp(score, kMinScore, kMaxScore);
    t.low_confidence = cls.similarities[cls.index] < cfg.confidence_floor ||
                       (cfg.min_margin > 0.0 && recog::top_margin(cls) < cfg.min_margin);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::vector<ActionTriplet> analyze_sequence(const motion::Detector& detector, const recog::SignalEncoder& encoder,
                                            const recog::TextEmbeddingProvider& provider,
                                            const quality::Scorer& scorer, const recog::LabelSet& labels,
                                            const signal::SignalSequence& seq, const AnalyzeConfig& cfg) {
  check_compatibility(detector, encoder, provider, scorer, labels);
  return run(detector, encoder, scorer, labels, provider.embed_labels(labels), seq, cfg);
}

std::vector<ActionTriplet> analyze_sequence(const ModelSet& m, const signal::SignalSequence& seq,
                                            const AnalyzeConfig& cfg) {
  return analyze_sequence(m.detector, m.encoder, m.provider, m.scorer, m.labels, seq, cfg);
}

std::vector<std::vector<ActionTriplet>> analyze_many(const ModelSet& m,
                                                     const std::vector<signal::SignalSequence>& seqs,
                                                     const AnalyzeConfig& cfg, unsigned threads) {
  check_compatibility(m.detector, m.encoder, m.provider, m.scorer, m.labels);
  for (const auto& s : seqs)
    if (std::abs(s.rate() - signal::kCanonicalRateHz) > 1e-9)
      throw Error(ErrorCode::kIncompatibleModel,
                  fmt::format("signal at {} Hz, models run at {} Hz", s.rate(), signal::kCanonicalRateHz), "rate");
  const Eigen::MatrixXd label_matrix = m.provider.embed_labels(m.labels);

  std::vector<std::vector<ActionTriplet>> out(seqs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, seqs.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < seqs.size(); ++i)
      out[i] = run(m.detector, m.encoder, m.scorer, m.labels, label_matrix, seqs[i], cfg);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < seqs.size();) {
        try {
          out[i] = run(m.detector, m.encoder, m.scorer, m.labels, label_matrix, seqs[i], cfg);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace kinesis::pipeline

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/recog/contrastive.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "kinesis/common/error.hpp"
#include "kinesis/nn/optim.hpp"
#include "kinesis/signal/csv.hpp"
#include "kinesis/signal/ops.hpp"

namespace kinesis::recog {

using nn::Matrix;

void ContrastiveConfig::validate() const {
  if (!(temperature > 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be positive", "temperature");
  if (batch_size < 2) throw Error(ErrorCode::kInvalidArgument, "batch size must be at least 2", "batch_size");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive", "learning_rate");
}

void to_json(nlohmann::json& j, const ContrastiveConfig& c) {
  j = {{"temperature", c.temperature}, {"batch_size", c.batch_size},
       {"epochs", c.epochs},           {"learning_rate", c.learning_rate},
       {"seed", c.seed},               {"validation_fraction", c.validation_fraction},
       {"weight_decay", c.weight_decay}, {"clip_norm", c.clip_norm}};
}

void from_json(const nlohmann::json& j, ContrastiveConfig& c) {
  ContrastiveConfig d;
  c.temperature = j.value("temperature", d.temperature);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.epochs = j.value("epochs", d.epochs);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.seed = j.value("seed", d.seed);
  c.validation_fraction = j.value("validation_fraction", d.validation_fraction);
  c.weight_decay = j.value("weight_decay", d.weight_decay);
  c.clip_norm = j.value("clip_norm", d.clip_norm);
}

double symmetric_infonce(const Eigen::MatrixXd& signal, const Eigen::MatrixXd& text,
                         const std::vector<std::size_t>& class_ids, double temperature, Eigen::MatrixXd* grad) {
  const Eigen::Index b = signal.rows();
  if (text.rows() != b || text.cols() != signal.cols() || class_ids.size() != static_cast<std::size_t>(b)) {
    throw Error(ErrorCode::kDimensionMismatch, "contrastive batch shapes disagree");
  }
  if (b == 0) throw Error(ErrorCode::kEmptyInput, "empty contrastive batch");
  const Eigen::MatrixXd logits = signal * text.transpose() / temperature;
  Eigen::MatrixXd positive(b, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    for (Eigen::Index j = 0; j < b; ++j) {
      positive(i, j) = class_ids[static_cast<std::size_t>(i)] == class_ids[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
    }
  }
  // Row-wise (signal -> label) and column-wise (label -> signal) log-softmax.
  Eigen::MatrixXd row_prob(b, b), col_prob(b, b);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < b; ++i) {
    const double m = logits.row(i).maxCoeff();
    const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
    row_prob.row(i) = (logits.row(i).array() - lse).exp();
    const double count = positive.row(i).sum();
    for (Eigen::Index j = 0; j < b; ++j) {
      if (positive(i, j) > 0.0) loss -= (logits(i, j) - lse) / count / static_cast<double>(b) / 2.0;
    }
  }
  for (Eigen::Index j = 0; j < b; ++j) {
    const double m = logits.col(j).maxCoeff();
    const double lse = m + std::log((logits.col(j).array() - m).exp().sum());
    col_prob.col(j) = (logits.col(j).array() - lse).exp();
    const double count = positive.col(j).sum();
    for (Eigen::Index i = 0; i < b; ++i) {
      if (positive(i, j) > 0.0) loss -= (logits(i, j) - lse) / count / static_cast<double>(b) / 2.0;
    }
  }
  if (grad) {
    Eigen::MatrixXd row_target = positive;
    for (Eigen::Index i = 0; i < b; ++i) row_target.row(i) /= positive.row(i).sum();
    Eigen::MatrixXd col_target = positive;
    for (Eigen::Index j = 0; j < b; ++j) col_target.col(j) /= positive.col(j).sum();
    const Eigen::MatrixXd dlogits = ((row_prob - row_target) + (col_prob - col_target)) / (2.0 * static_cast<double>(b));
    *grad = dlogits * text / temperature;
  }
  return loss;
}

namespace {

struct Prepared {
  Matrix<float> tokens;
  std::size_t class_id = 0;
};

std::vector<Prepared> prepare(const SignalEncoder& encoder, const std::vector<LabeledSegment>& data,
                              const std::map<std::string, std::size_t>& class_of) {
  std::vector<Prepared> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back({encoder.tokenize(s.frames), class_of.at(s.label)});
  return out;
}

std::map<std::string, std::size_t> index_classes(const std::vector<LabeledSegment>& data,
                                                 const TextEmbeddingProvider& provider, Eigen::MatrixXd& table) {
  std::map<std::string, std::size_t> class_of;
  for (const auto& s : data) {
    if (!provider.covers(s.label)) throw Error(ErrorCode::kUnknownLabel, "label not covered by text provider", s.label);
    class_of.emplace(s.label, 0);
  }
  table.resize(static_cast<Eigen::Index>(class_of.size()), static_cast<Eigen::Index>(provider.dim()));
  std::size_t i = 0;
  for (auto& [label, idx] : class_of) {
    idx = i;
    table.row(static_cast<Eigen::Index>(i++)) = provider.embed(label).transpose();
  }
  return class_of;
}

// Forward one batch; with `train` also back-propagates into the encoder.
double run_batch(SignalEncoder& encoder, const std::vector<const Prepared*>& batch, const Eigen::MatrixXd& table,
                 double temperature, bool train) {
  const auto b = static_cast<Eigen::Index>(batch.size());
  const auto d = table.cols();
  if (static_cast<std::size_t>(encoder.arch().dim) != static_cast<std::size_t>(d)) {
    throw Error(ErrorCode::kDimensionMismatch, "encoder output size differs from text embedding size");
  }
  std::vector<SignalEncoder::Cache> caches(batch.size());
  Eigen::MatrixXd raw(b, d), unit(b, d), text(b, d);
  Eigen::VectorXd norms(b);
  std::vector<std::size_t> ids(batch.size());
  for (Eigen::Index i = 0; i < b; ++i) {
    const auto* p = batch[static_cast<std::size_t>(i)];
    raw.row(i) = encoder.forward(p->tokens, caches[static_cast<std::size_t>(i)]).row(0).cast<double>();
    norms[i] = std::max(raw.row(i).norm(), 1e-12);
    unit.row(i) = raw.row(i) / norms[i];
    text.row(i) = table.row(static_cast<Eigen::Index>(p->class_id));
    ids[static_cast<std::size_t>(i)] = p->class_id;
  }
  Eigen::MatrixXd dunit;
  const double loss = symmetric_infonce(unit, text, ids, temperature, train ? &dunit : nullptr);
  if (train) {
    for (Eigen::Index i = 0; i < b; ++i) {
      const Eigen::RowVectorXd e = unit.row(i);
      const Eigen::RowVectorXd g = dunit.row(i);
      const Eigen::RowVectorXd draw = (g - e * e.dot(g)) / norms[i];
      encoder.backward(caches[static_cast<std::size_t>(i)], draw.cast<float>());
    }
  }
  return loss;
}

double mean_loss(SignalEncoder& encoder, const std::vector<Prepared>& data, const Eigen::MatrixXd& table,
                 const ContrastiveConfig& cfg) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  std::size_t batches = 0;
  for (std::size_t begin = 0; begin < data.size(); begin += cfg.batch_size) {
    std::vector<const Prepared*> batch;
    for (std::size_t i = begin; i < std::min(data.size(), begin + cfg.batch_size); ++i) batch.push_back(&data[i]);
    total += run_batch(encoder, batch, table, cfg.temperature, false);
    ++batches;
  }
  return total / static_cast<double>(batches);
}

void train_epochs(SignalEncoder& encoder, const std::vector<Prepared>& train, const std::vector<Prepared>& held_out,
                  const Eigen::MatrixXd& table, const ContrastiveConfig& cfg, Rng& rng, EncoderRecord& record) {
  nn::AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  adam_cfg.weight_decay = cfg.weight_decay;
  adam_cfg.clip_norm = cfg.clip_norm;
  nn::Adam<float> adam(encoder.parameters(), adam_cfg);
  if (!held_out.empty()) record.validation_curve.push_back(mean_loss(encoder, held_out, table, cfg));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      if (end - begin < 2) continue;
      std::vector<const Prepared*> batch;
      for (std::size_t i = begin; i < end; ++i) batch.push_back(&train[order[i]]);
      total += run_batch(encoder, batch, table, cfg.temperature, true);
      adam.step();
      ++batches;
    }
    record.loss_curve.push_back(batches ? total / static_cast<double>(batches) : 0.0);
    if (!held_out.empty()) record.validation_curve.push_back(mean_loss(encoder, held_out, table, cfg));
    spdlog::debug("{} epoch {} loss {:.4f}", record.stage, epoch + 1, record.loss_curve.back());
  }
}

}  // namespace

double contrastive_loss(const SignalEncoder& encoder, const std::vector<LabeledSegment>& data,
                        const TextEmbeddingProvider& provider, const ContrastiveConfig& cfg) {
  Eigen::MatrixXd table;
  const auto class_of = index_classes(data, provider, table);
  SignalEncoder copy = encoder;
  return mean_loss(copy, prepare(encoder, data, class_of), table, cfg);
}

SignalEncoder pretrain_contrastive(SignalEncoder encoder, const std::vector<LabeledSegment>& data,
                                   const TextEmbeddingProvider& provider, const ContrastiveConfig& cfg,
                                   EncoderRecord* record) {
  cfg.validate();
  if (data.empty()) throw Error(ErrorCode::kEmptyInput, "pretraining set is empty");
  Eigen::MatrixXd table;
  const auto class_of = index_classes(data, provider, table);

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_val = static_cast<std::size_t>(cfg.validation_fraction * static_cast<double>(data.size()));
  n_val = std::min(n_val, data.size() - std::min<std::size_t>(data.size(), 2));
  std::vector<LabeledSegment> train_set, held_set;
  for (std::size_t k = 0; k < order.size(); ++k) (k < n_val ? held_set : train_set).push_back(data[order[k]]);

  std::vector<signal::Frames> frames;
  for (const auto& s : train_set) frames.push_back(s.frames);
  encoder.set_norm(signal::fit_norm_stats(std::span<const signal::Frames>(frames)));

  EncoderRecord local{"pretrain", cfg.epochs, cfg.seed, {}, {}};
  train_epochs(encoder, prepare(encoder, train_set, class_of), prepare(encoder, held_set, class_of), table, cfg, rng,
               local);
  if (record) *record = std::move(local);
  return encoder;
}

std::vector<LabeledSegment> take_kshot(const std::vector<LabeledSegment>& pool, const LabelSet& labels, std::size_t k) {
  std::vector<LabeledSegment> out;
  std::map<std::string, std::size_t> taken;
  for (const auto& s : pool) {
    if (!labels.contains(s.label)) continue;
    if (taken[s.label] < k) {
      ++taken[s.label];
      out.push_back(s);
    }
  }
  return out;
}

SignalEncoder finetune_kshot(SignalEncoder encoder, const std::vector<LabeledSegment>& samples,
                             const LabelSet& labels, std::size_t k, const TextEmbeddingProvider& provider,
                             const ContrastiveConfig& cfg, EncoderRecord* record) {
  cfg.validate();
  if (!encoder.has_lora()) throw Error(ErrorCode::kNoAdapters, "inject adapters before few-shot fine-tuning");
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) counts[l] = 0;
  for (const auto& s : samples) {
    if (!labels.contains(s.label)) throw Error(ErrorCode::kUnknownLabel, "sample label not in label set", s.label);
    ++counts[s.label];
  }
  std::string deficit;
  for (const auto& l : labels) {
    if (counts[l] != k) {
      if (!deficit.empty()) deficit += ", ";
      deficit += l + " (" + std::to_string(counts[l]) + "/" + std::to_string(k) + ")";
    }
  }
  if (!deficit.empty()) throw Error(ErrorCode::kClassDeficit, "expected exactly " + std::to_string(k) + " samples per class", deficit);

  Eigen::MatrixXd table;
  const auto class_of = index_classes(samples, provider, table);
  Rng rng(cfg.seed);
  EncoderRecord local{"finetune", cfg.epochs, cfg.seed, {}, {}};
  train_epochs(encoder, prepare(encoder, samples, class_of), {}, table, cfg, rng, local);
  if (record) *record = std::move(local);
  return encoder;
}

std::filesystem::path save_labeled_segments(const std::filesystem::path& dir,
                                            const std::vector<LabeledSegment>& segments) {
  std::filesystem::create_directories(dir / "segments");
  const auto manifest = dir / "manifest.csv";
  std::ofstream out(manifest);
  if (!out) throw Error(ErrorCode::kIo, "cannot write segment manifest", manifest.string());
  out << "segment_path,label\n";
  char name[32];
  for (std::size_t i = 0; i < segments.size(); ++i) {
    std::snprintf(name, sizeof name, "segments/%06zu.csv", i);
    signal::save_signal(dir / name, signal::SignalSequence::from_frames(signal::kCanonicalRateHz, segments[i].frames));
    out << name << ',' << segments[i].label << '\n';
  }
  return manifest;
}

std::vector<LabeledSegment> load_labeled_segments(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "segment manifest not found", manifest.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "segment_path,label")
    throw Error(ErrorCode::kParse, "header must be segment_path,label", manifest.string() + ":1");
  std::vector<LabeledSegment> out;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma + 1 == line.size())
      throw Error(ErrorCode::kParse, "expected segment_path,label", manifest.string() + ":" + std::to_string(line_no));
    out.push_back({signal::ingest_signal(manifest.parent_path() / line.substr(0, comma)).frames(),
                   line.substr(comma + 1)});
  }
  return out;
}

}  // namespace kinesis::recog

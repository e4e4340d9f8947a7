// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/quality/scorer.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <numeric>

#include "kinesis/common/error.hpp"
#include "kinesis/nn/checkpoint.hpp"
#include "kinesis/nn/optim.hpp"
#include "kinesis/signal/csv.hpp"

namespace kinesis::quality {

using nn::Matrix;

template <class T>
BasicScorer<T>::BasicScorer(const ScorerArch& arch, std::uint64_t seed)
    : arch_(arch),
      fc1_("scorer.fc1", 2 * arch.embedding_dim, arch.hidden1),
      fc2_("scorer.fc2", arch.hidden1, arch.hidden2),
      fc3_("scorer.fc3", arch.hidden2, 1) {
  if (arch.embedding_dim < 1 || arch.hidden1 < 1 || arch.hidden2 < 1) {
    throw Error(ErrorCode::kInvalidArgument, "unsupported scorer architecture");
  }
  Rng rng(seed);
  fc1_.init(rng);
  fc2_.init(rng);
  fc3_.init(rng);
}

template <class T>
Matrix<T> BasicScorer<T>::logits(const Matrix<T>& x) const {
  return fc3_.forward(nn::gelu<T>(fc2_.forward(nn::gelu<T>(fc1_.forward(x)))));
}

template <class T>
Matrix<T> BasicScorer<T>::logits(const Matrix<T>& x, Cache& cache) const {
  cache.pre1 = fc1_.forward(x, cache.fc1);
  cache.pre2 = fc2_.forward(nn::gelu<T>(cache.pre1), cache.fc2);
  return fc3_.forward(nn::gelu<T>(cache.pre2), cache.fc3);
}

template <class T>
Matrix<T> BasicScorer<T>::backward(const Cache& cache, const Matrix<T>& dlogits) {
  Matrix<T> d = fc3_.backward(cache.fc3, dlogits);
  d = fc2_.backward(cache.fc2, nn::gelu_backward<T>(cache.pre2, d));
  return fc1_.backward(cache.fc1, nn::gelu_backward<T>(cache.pre1, d));
}

template <class T>
nn::ParameterRefs<T> BasicScorer<T>::parameters() {
  nn::ParameterRefs<T> out;
  fc1_.collect(out);
  fc2_.collect(out);
  fc3_.collect(out);
  return out;
}

template <class T>
std::vector<const nn::Parameter<T>*> BasicScorer<T>::parameters() const {
  std::vector<const nn::Parameter<T>*> out;
  fc1_.collect(out);
  fc2_.collect(out);
  fc3_.collect(out);
  return out;
}

template <class T>
std::string BasicScorer<T>::parameters_hash() const {
  return nn::parameters_hash(parameters());
}

template class BasicScorer<float>;
template class BasicScorer<double>;

namespace {

Matrix<float> concat_row(const Eigen::VectorXd& signal_embedding, const Eigen::VectorXd& label_embedding, int dim) {
  if (signal_embedding.size() != dim || label_embedding.size() != dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "scorer expects two vectors of dimension " + std::to_string(dim) + ", got " +
                    std::to_string(signal_embedding.size()) + " and " + std::to_string(label_embedding.size()));
  }
  Matrix<float> x(1, 2 * dim);
  x.leftCols(dim) = signal_embedding.transpose().cast<float>();
  x.rightCols(dim) = label_embedding.transpose().cast<float>();
  return x;
}

Matrix<float> features(const std::vector<ScoredSample>& samples, const recog::SignalEncoder& encoder,
                       const recog::TextEmbeddingProvider& provider, int dim) {
  Matrix<float> x(static_cast<Eigen::Index>(samples.size()), 2 * dim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) =
        concat_row(encoder.embed(samples[i].frames), provider.embed(samples[i].label), dim).row(0);
  }
  return x;
}

std::vector<double> predict(const Scorer& scorer, const Matrix<float>& x) {
  const Matrix<float> z = scorer.logits(x);
  std::vector<double> out(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) out[static_cast<std::size_t>(i)] = squash(z(i, 0));
  return out;
}

double mse(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return a.empty() ? 0.0 : s / static_cast<double>(a.size());
}

double parse_score(const std::string& text, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParse, "score is not a number", where);
  }
  if (!(v >= 0.0 && v <= kMaxScore)) throw Error(ErrorCode::kParse, "score outside [0, 5]", where);
  return v;
}

}  // namespace

double score_segment(const Scorer& scorer, const Eigen::VectorXd& signal_embedding,
                     const Eigen::VectorXd& label_embedding) {
  const Matrix<float> z = scorer.logits(concat_row(signal_embedding, label_embedding, scorer.arch().embedding_dim));
  return squash(static_cast<double>(z(0, 0)));
}

std::vector<ScoredSample> load_scored_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "scored manifest not found", path.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "segment_path,label,score") {
    throw Error(ErrorCode::kParse, "header must be segment_path,label,score", path.string() + ":1");
  }
  std::vector<ScoredSample> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto c1 = line.find(',');
    const auto c2 = line.rfind(',');
    if (c1 == std::string::npos || c1 == c2) throw Error(ErrorCode::kParse, "expected three fields", where);
    ScoredSample s;
    s.segment_path = line.substr(0, c1);
    s.label = line.substr(c1 + 1, c2 - c1 - 1);
    s.score = parse_score(line.substr(c2 + 1), where);
    s.frames = signal::ingest_signal(path.parent_path() / s.segment_path).frames();
    out.push_back(std::move(s));
  }
  return out;
}

void save_scored_manifest(const std::filesystem::path& path, const std::vector<ScoredSample>& samples) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write scored manifest", path.string());
  out << "segment_path,label,score\n";
  char buf[32];
  for (const auto& s : samples) {
    const auto res = std::to_chars(buf, buf + sizeof buf, s.score);
    out << s.segment_path << ',' << s.label << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf))
        << '\n';
  }
}

std::filesystem::path save_scored_samples(const std::filesystem::path& dir, std::vector<ScoredSample> samples) {
  std::filesystem::create_directories(dir / "segments");
  char name[32];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::snprintf(name, sizeof name, "segments/%06zu.csv", i);
    signal::save_signal(dir / name, signal::SignalSequence::from_frames(signal::kCanonicalRateHz, samples[i].frames));
    samples[i].segment_path = name;
  }
  const auto manifest = dir / "manifest.csv";
  save_scored_manifest(manifest, samples);
  return manifest;
}

void to_json(nlohmann::json& j, const ScorerTrainConfig& c) {
  j = {{"epochs", c.epochs}, {"batch_size", c.batch_size}, {"learning_rate", c.learning_rate},
       {"seed", c.seed},     {"validation_fraction", c.validation_fraction}, {"weight_decay", c.weight_decay}};
}

void from_json(const nlohmann::json& j, ScorerTrainConfig& c) {
  ScorerTrainConfig d;
  c.epochs = j.value("epochs", d.epochs);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.seed = j.value("seed", d.seed);
  c.validation_fraction = j.value("validation_fraction", d.validation_fraction);
  c.weight_decay = j.value("weight_decay", d.weight_decay);
}

Scorer train_scorer(const std::vector<ScoredSample>& samples, const recog::SignalEncoder& encoder,
                    const recog::TextEmbeddingProvider& provider, const ScorerTrainConfig& cfg,
                    ScorerRecord* record) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyInput, "no scored samples");
  if (cfg.batch_size < 1) throw Error(ErrorCode::kInvalidArgument, "batch size must be positive", "batch_size");
  ScorerArch arch;
  arch.embedding_dim = encoder.arch().dim;
  Scorer scorer(arch, derive_seed(cfg.seed, 1));

  const Matrix<float> x_all = features(samples, encoder, provider, arch.embedding_dim);
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_val = static_cast<std::size_t>(cfg.validation_fraction * static_cast<double>(samples.size()));
  n_val = std::min(n_val, samples.size() - 1);
  const std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

  Matrix<float> x_val(static_cast<Eigen::Index>(val.size()), x_all.cols());
  std::vector<double> y_val;
  for (std::size_t i = 0; i < val.size(); ++i) {
    x_val.row(static_cast<Eigen::Index>(i)) = x_all.row(static_cast<Eigen::Index>(val[i]));
    y_val.push_back(samples[val[i]].score);
  }
  double train_mean = 0.0;
  for (auto i : train) train_mean += samples[i].score;
  train_mean /= static_cast<double>(train.size());

  ScorerRecord local;
  local.epochs = cfg.epochs;
  local.seed = cfg.seed;
  local.baseline_mse = mse(std::vector<double>(y_val.size(), train_mean), y_val);

  nn::AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  adam_cfg.weight_decay = cfg.weight_decay;
  nn::Adam<float> adam(scorer.parameters(), adam_cfg);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng);
    double total = 0.0;
    for (std::size_t begin = 0; begin < train.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(train.size(), begin + cfg.batch_size);
      const auto b = static_cast<Eigen::Index>(end - begin);
      Matrix<float> x(b, x_all.cols());
      for (Eigen::Index i = 0; i < b; ++i) x.row(i) = x_all.row(static_cast<Eigen::Index>(train[begin + static_cast<std::size_t>(i)]));
      BasicScorer<float>::Cache cache;
      const Matrix<float> z = scorer.logits(x, cache);
      Matrix<float> dz(b, 1);
      for (Eigen::Index i = 0; i < b; ++i) {
        const double s = nn::sigmoid(static_cast<double>(z(i, 0)));
        const double err = kMaxScore * s - samples[train[begin + static_cast<std::size_t>(i)]].score;
        total += err * err;
        dz(i, 0) = static_cast<float>(2.0 * err * kMaxScore * s * (1.0 - s) / static_cast<double>(b));
      }
      scorer.backward(cache, dz);
      adam.step();
    }
    local.loss_curve.push_back(total / static_cast<double>(train.size()));
    if (!val.empty()) local.validation_mse.push_back(mse(predict(scorer, x_val), y_val));
  }
  spdlog::debug("scorer trained: final loss {:.4f}", local.loss_curve.empty() ? 0.0 : local.loss_curve.back());
  if (record) *record = std::move(local);
  return scorer;
}

ScoreStats score_stats(const std::vector<double>& predicted, const std::vector<double>& gold) {
  if (predicted.size() != gold.size()) throw Error(ErrorCode::kDimensionMismatch, "prediction and gold counts differ");
  if (gold.size() < 2) throw Error(ErrorCode::kInsufficientData, "need at least two scored samples");
  ScoreStats s;
  s.count = gold.size();
  s.mse = mse(predicted, gold);
  const double n = static_cast<double>(gold.size());
  const double mp = std::accumulate(predicted.begin(), predicted.end(), 0.0) / n;
  const double mg = std::accumulate(gold.begin(), gold.end(), 0.0) / n;
  double cov = 0.0, vp = 0.0, vg = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    cov += (predicted[i] - mp) * (gold[i] - mg);
    vp += (predicted[i] - mp) * (predicted[i] - mp);
    vg += (gold[i] - mg) * (gold[i] - mg);
  }
  s.pearson_undefined = vp <= 0.0 || vg <= 0.0;
  s.pearson = s.pearson_undefined ? 0.0 : cov / std::sqrt(vp * vg);
  return s;
}

ScoreStats eval_scorer(const Scorer& scorer, const std::vector<ScoredSample>& samples,
                       const recog::SignalEncoder& encoder, const recog::TextEmbeddingProvider& provider) {
  if (samples.size() < 2) throw Error(ErrorCode::kInsufficientData, "need at least two scored samples");
  std::vector<double> gold;
  for (const auto& s : samples) gold.push_back(s.score);
  return score_stats(predict(scorer, features(samples, encoder, provider, scorer.arch().embedding_dim)), gold);
}

nlohmann::json to_json(const ScoreStats& s) {
  return {{"count", s.count}, {"mse", s.mse}, {"pearson", s.pearson}, {"pearson_undefined", s.pearson_undefined}};
}

void save_scorer(const std::filesystem::path& path, const Scorer& scorer, const ScorerRecord& record) {
  const auto& a = scorer.arch();
  nlohmann::json header = {
      {"arch", {{"embedding_dim", a.embedding_dim}, {"hidden1", a.hidden1}, {"hidden2", a.hidden2}}},
      {"input_order", {"signal", "label"}},
      {"output", "5*sigmoid"},
      {"training",
       {{"epochs", record.epochs},
        {"seed", record.seed},
        {"loss_curve", record.loss_curve},
        {"validation_mse", record.validation_mse},
        {"baseline_mse", record.baseline_mse}}}};
  nn::Checkpoint ckpt(kScorerKind, header);
  for (const auto* p : scorer.parameters()) ckpt.add(*p);
  ckpt.save(path);
}

Scorer load_scorer(const std::filesystem::path& path) {
  const auto ckpt = nn::Checkpoint::load(path, kScorerKind);
  const auto& h = ckpt.header();
  try {
    if (h.at("input_order") != nlohmann::json({"signal", "label"})) {
      throw Error(ErrorCode::kIncompatibleModel, "unsupported scorer input order", path.string());
    }
    ScorerArch arch;
    arch.embedding_dim = h.at("arch").at("embedding_dim").get<int>();
    arch.hidden1 = h.at("arch").at("hidden1").get<int>();
    arch.hidden2 = h.at("arch").at("hidden2").get<int>();
    Scorer scorer(arch, 0);
    for (auto* p : scorer.parameters()) ckpt.restore(*p);
    return scorer;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("scorer header: ") + e.what(), path.string());
  }
}

}  // namespace kinesis::quality

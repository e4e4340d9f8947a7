// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/motion/detector.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kinesis/common/error.hpp"
#include "kinesis/nn/checkpoint.hpp"

namespace kinesis::motion {

using nn::Matrix;

void to_json(nlohmann::json& j, const DetectorTrainConfig& cfg) {
  j = {{"epochs", cfg.epochs},
       {"batch_size", cfg.batch_size},
       {"learning_rate", cfg.learning_rate},
       {"seed", cfg.seed},
       {"window", cfg.window},
       {"validation_fraction", cfg.validation_fraction},
       {"crops_per_sequence", cfg.crops_per_sequence},
       {"clip_norm", cfg.clip_norm}};
}

void from_json(const nlohmann::json& j, DetectorTrainConfig& cfg) {
  DetectorTrainConfig d;
  cfg.epochs = j.value("epochs", d.epochs);
  cfg.batch_size = j.value("batch_size", d.batch_size);
  cfg.learning_rate = j.value("learning_rate", d.learning_rate);
  cfg.seed = j.value("seed", d.seed);
  cfg.window = j.contains("window") ? j.at("window").get<signal::WindowConfig>() : d.window;
  cfg.validation_fraction = j.value("validation_fraction", d.validation_fraction);
  cfg.crops_per_sequence = j.value("crops_per_sequence", d.crops_per_sequence);
  cfg.clip_norm = j.value("clip_norm", d.clip_norm);
}

Detector::Detector(const DetectorArch& arch, std::uint64_t seed)
    : arch_(arch),
      lstm_("lstm", arch.input, arch.hidden, arch.layers),
      head_("head", arch.hidden, 1) {
  if (arch.layers < 1 || arch.hidden < 1 || arch.input != static_cast<int>(signal::kChannels)) {
    throw Error(ErrorCode::kInvalidArgument, "unsupported detector architecture");
  }
  Rng rng(seed);
  lstm_.init(rng);
  head_.init(rng);
}

void Detector::set_window(const signal::WindowConfig& window) {
  window.validate();
  window_ = window;
}

Matrix<float> Detector::logits(const Matrix<float>& time_major, Eigen::Index batch) const {
  return head_.forward(lstm_.forward(time_major, batch));
}

namespace {

// Stacks normalised windows time-major: row t * batch + b is frame t of window b.
Matrix<float> stack_windows(const std::vector<const signal::Frames*>& windows, std::size_t length,
                            const signal::NormStats& norm) {
  const auto batch = static_cast<Eigen::Index>(windows.size());
  Matrix<float> x = Matrix<float>::Zero(static_cast<Eigen::Index>(length) * batch, signal::kChannels);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto& w = *windows[static_cast<std::size_t>(b)];
    const auto rows = std::min<Eigen::Index>(w.rows(), static_cast<Eigen::Index>(length));
    for (Eigen::Index t = 0; t < rows; ++t) {
      for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(signal::kChannels); ++c) {
        const auto ci = static_cast<std::size_t>(c);
        x(t * batch + b, c) = static_cast<float>((w(t, c) - norm.mean[ci]) / norm.std[ci]);
      }
    }
  }
  return x;
}

}  // namespace

std::vector<std::vector<double>> Detector::predict_windows(const std::vector<signal::Frames>& windows) const {
  if (windows.empty()) return {};
  const auto length = static_cast<std::size_t>(windows.front().rows());
  std::vector<const signal::Frames*> ptrs;
  for (const auto& w : windows) {
    if (static_cast<std::size_t>(w.rows()) != length) {
      throw Error(ErrorCode::kDimensionMismatch, "windows in a batch must share a length");
    }
    ptrs.push_back(&w);
  }
  const auto batch = static_cast<Eigen::Index>(windows.size());
  const Matrix<float> z = logits(stack_windows(ptrs, length, norm_), batch);
  std::vector<std::vector<double>> out(windows.size(), std::vector<double>(length));
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t b = 0; b < windows.size(); ++b) {
      out[b][t] = nn::sigmoid(static_cast<double>(z(static_cast<Eigen::Index>(t) * batch + static_cast<Eigen::Index>(b), 0)));
    }
  }
  return out;
}

std::vector<double> Detector::predict_window(const Eigen::Ref<const Eigen::MatrixXd>& window) const {
  if (window.cols() != static_cast<Eigen::Index>(signal::kChannels)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected 6 channels, got " + std::to_string(window.cols()), "window");
  }
  signal::Frames frames = window;
  return predict_windows({frames}).front();
}

nn::ParameterRefs<float> Detector::parameters() {
  nn::ParameterRefs<float> out;
  lstm_.collect(out);
  head_.collect(out);
  return out;
}

std::vector<const nn::Parameter<float>*> Detector::parameters() const {
  std::vector<const nn::Parameter<float>*> out;
  lstm_.collect(out);
  head_.collect(out);
  return out;
}

std::string Detector::parameters_hash() const { return nn::parameters_hash(parameters()); }

void Detector::save(const std::filesystem::path& path) const {
  nlohmann::json header = {
      {"arch", {{"layers", arch_.layers}, {"hidden", arch_.hidden}, {"input", arch_.input}}},
      {"norm", norm_},
      {"window", window_},
      {"training",
       {{"epochs", training_.epochs},
        {"seed", training_.seed},
        {"loss_curve", training_.loss_curve},
        {"validation_curve", training_.validation_curve}}}};
  nn::Checkpoint ckpt(kDetectorKind, header);
  for (const auto* p : parameters()) ckpt.add(*p);
  ckpt.save(path);
}

Detector Detector::load(const std::filesystem::path& path) {
  const auto ckpt = nn::Checkpoint::load(path, kDetectorKind);
  const auto& h = ckpt.header();
  try {
    DetectorArch arch;
    arch.layers = h.at("arch").at("layers").get<int>();
    arch.hidden = h.at("arch").at("hidden").get<int>();
    arch.input = h.at("arch").at("input").get<int>();
    Detector model(arch, 0);
    for (auto* p : model.parameters()) ckpt.restore(*p);
    model.norm_ = h.at("norm").get<signal::NormStats>();
    model.window_ = h.at("window").get<signal::WindowConfig>();
    const auto& tr = h.at("training");
    model.training_.epochs = tr.at("epochs").get<std::size_t>();
    model.training_.seed = tr.at("seed").get<std::uint64_t>();
    model.training_.loss_curve = tr.at("loss_curve").get<std::vector<double>>();
    model.training_.validation_curve = tr.at("validation_curve").get<std::vector<double>>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("detector header: ") + e.what(), path.string());
  }
}

template <class T>
double masked_bce(const Matrix<T>& logits, const Matrix<T>& targets, const Matrix<T>& weights, Matrix<T>* grad) {
  const double total_weight = weights.template cast<double>().sum();
  if (grad) *grad = Matrix<T>::Zero(logits.rows(), logits.cols());
  if (total_weight <= 0.0) return 0.0;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double w = static_cast<double>(weights.data()[i]);
    if (w <= 0.0) continue;
    const double z = static_cast<double>(logits.data()[i]);
    const double y = static_cast<double>(targets.data()[i]);
    // log(1 + e^z) - y z, written to stay finite for large |z|.
    loss += w * (std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z))));
    if (grad) grad->data()[i] = static_cast<T>(w * (nn::sigmoid(z) - y) / total_weight);
  }
  return loss / total_weight;
}

template double masked_bce<float>(const Matrix<float>&, const Matrix<float>&, const Matrix<float>&, Matrix<float>*);
template double masked_bce<double>(const Matrix<double>&, const Matrix<double>&, const Matrix<double>&,
                                   Matrix<double>*);

namespace {

struct Crop {
  std::size_t sequence = 0;
  std::size_t start = 0;
  std::size_t valid = 0;
};

Crop random_crop(std::size_t sequence, std::size_t n, std::size_t length, Rng& rng) {
  if (n <= length) return {sequence, 0, n};
  std::uniform_int_distribution<std::size_t> start(0, n - length);
  return {sequence, start(rng), length};
}

struct Batch {
  Matrix<float> x;
  Matrix<float> targets;
  Matrix<float> weights;
  Eigen::Index size = 0;
};

Batch build_batch(const std::vector<Crop>& crops, const std::vector<signal::SignalSequence>& signals,
                  const std::vector<synth::MotionMask>& masks, std::size_t length, const signal::NormStats& norm) {
  Batch b;
  b.size = static_cast<Eigen::Index>(crops.size());
  std::vector<signal::Frames> windows;
  windows.reserve(crops.size());
  for (const auto& c : crops) {
    windows.push_back(signals[c.sequence].frames().middleRows(static_cast<Eigen::Index>(c.start),
                                                              static_cast<Eigen::Index>(c.valid)));
  }
  std::vector<const signal::Frames*> ptrs;
  for (const auto& w : windows) ptrs.push_back(&w);
  b.x = stack_windows(ptrs, length, norm);
  const Eigen::Index rows = static_cast<Eigen::Index>(length) * b.size;
  b.targets = Matrix<float>::Zero(rows, 1);
  b.weights = Matrix<float>::Zero(rows, 1);
  for (Eigen::Index k = 0; k < b.size; ++k) {
    const auto& c = crops[static_cast<std::size_t>(k)];
    for (std::size_t t = 0; t < c.valid; ++t) {
      const Eigen::Index r = static_cast<Eigen::Index>(t) * b.size + k;
      b.targets(r, 0) = masks[c.sequence][c.start + t] ? 1.0f : 0.0f;
      b.weights(r, 0) = 1.0f;
    }
  }
  return b;
}

void check_dataset(const std::vector<signal::SignalSequence>& signals, const std::vector<synth::MotionMask>& masks) {
  if (signals.empty()) throw Error(ErrorCode::kEmptyInput, "detector training set is empty");
  if (signals.size() != masks.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "signals and masks differ in count");
  }
  for (std::size_t i = 0; i < signals.size(); ++i) {
    if (signals[i].size() != masks[i].size()) {
      throw Error(ErrorCode::kDimensionMismatch, "mask length differs from signal length", std::to_string(i));
    }
    if (signals[i].empty()) throw Error(ErrorCode::kEmptyInput, "empty sequence in dataset", std::to_string(i));
  }
}

}  // namespace

double evaluate_loss(const Detector& model, const std::vector<signal::SignalSequence>& signals,
                     const std::vector<synth::MotionMask>& masks, const signal::WindowConfig& window,
                     std::uint64_t seed) {
  check_dataset(signals, masks);
  Rng rng(seed);
  const std::size_t chunk = 64;
  double weighted = 0.0;
  double frames = 0.0;
  for (std::size_t begin = 0; begin < signals.size(); begin += chunk) {
    std::vector<Crop> crops;
    for (std::size_t i = begin; i < std::min(signals.size(), begin + chunk); ++i) {
      crops.push_back(random_crop(i, signals[i].size(), window.length, rng));
    }
    const Batch b = build_batch(crops, signals, masks, window.length, model.norm());
    const double w = b.weights.cast<double>().sum();
    weighted += w * masked_bce<float>(model.logits(b.x, b.size), b.targets, b.weights, nullptr);
    frames += w;
  }
  return frames > 0 ? weighted / frames : 0.0;
}

Detector train_detector(const std::vector<signal::SignalSequence>& signals,
                        const std::vector<synth::MotionMask>& masks, const DetectorTrainConfig& cfg,
                        const DetectorArch& arch) {
  check_dataset(signals, masks);
  cfg.window.validate();
  if (cfg.batch_size < 1) throw Error(ErrorCode::kInvalidArgument, "batch size must be positive", "batch_size");

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(signals.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t n_val = static_cast<std::size_t>(cfg.validation_fraction * static_cast<double>(signals.size()));
  if (cfg.validation_fraction > 0.0 && signals.size() >= 2) n_val = std::max<std::size_t>(n_val, 1);
  n_val = std::min(n_val, signals.size() - 1);

  std::vector<signal::SignalSequence> train_signals, val_signals;
  std::vector<synth::MotionMask> train_masks, val_masks;
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto& sig = k < n_val ? val_signals : train_signals;
    auto& msk = k < n_val ? val_masks : train_masks;
    sig.push_back(signals[order[k]]);
    msk.push_back(masks[order[k]]);
  }

  Detector model(arch, derive_seed(cfg.seed, 1));
  model.set_window(cfg.window);
  model.set_norm(signal::fit_norm_stats(std::span<const signal::SignalSequence>(train_signals)));
  auto& record = model.training();
  record.epochs = cfg.epochs;
  record.seed = cfg.seed;

  const std::uint64_t val_seed = derive_seed(cfg.seed, 2);
  if (!val_signals.empty()) {
    record.validation_curve.push_back(evaluate_loss(model, val_signals, val_masks, cfg.window, val_seed));
  }

  nn::AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  adam_cfg.clip_norm = cfg.clip_norm;
  nn::Adam<float> adam(model.parameters(), adam_cfg);

  const std::size_t length = cfg.window.length;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<Crop> crops;
    for (std::size_t i = 0; i < train_signals.size(); ++i) {
      for (std::size_t r = 0; r < cfg.crops_per_sequence; ++r) {
        crops.push_back(random_crop(i, train_signals[i].size(), length, rng));
      }
    }
    std::shuffle(crops.begin(), crops.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < crops.size(); begin += cfg.batch_size) {
      const std::vector<Crop> chunk(crops.begin() + static_cast<std::ptrdiff_t>(begin),
                                    crops.begin() + static_cast<std::ptrdiff_t>(std::min(crops.size(), begin + cfg.batch_size)));
      const Batch b = build_batch(chunk, train_signals, train_masks, length, model.norm());
      nn::LstmStack<float>::Cache lstm_cache;
      nn::Linear<float>::Cache head_cache;
      const Matrix<float> hidden = model.lstm().forward(b.x, b.size, lstm_cache);
      const Matrix<float> z = model.head().forward(hidden, head_cache);
      Matrix<float> dz;
      loss_sum += masked_bce<float>(z, b.targets, b.weights, &dz);
      ++batches;
      const Matrix<float> dh = model.head().backward(head_cache, dz);
      model.lstm().backward(lstm_cache, dh, b.size);
      adam.step();
    }
    record.loss_curve.push_back(batches ? loss_sum / static_cast<double>(batches) : 0.0);
    if (!val_signals.empty()) {
      record.validation_curve.push_back(evaluate_loss(model, val_signals, val_masks, cfg.window, val_seed));
    }
    spdlog::debug("detector epoch {} loss {:.4f}", epoch + 1, record.loss_curve.back());
  }
  return model;
}

FrameProbabilities average_window_predictions(const signal::Frames& frames, const signal::WindowConfig& cfg,
                                              const WindowPredictor& predict, std::size_t batch) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(frames.rows());
  FrameProbabilities out;
  out.values.assign(n, 0.0);
  out.counts.assign(n, 0);
  const auto spans = signal::slice_windows(n, cfg);
  for (std::size_t begin = 0; begin < spans.size(); begin += batch) {
    const std::size_t end = std::min(spans.size(), begin + batch);
    std::vector<signal::Frames> windows;
    for (std::size_t i = begin; i < end; ++i) windows.push_back(signal::extract_window(frames, spans[i], cfg.length));
    const auto preds = predict(windows);
    for (std::size_t i = begin; i < end; ++i) {
      const auto& span = spans[i];
      const auto& p = preds[i - begin];
      for (std::size_t k = 0; k < span.valid; ++k) {
        out.values[span.start + k] += p[k];
        ++out.counts[span.start + k];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (out.counts[i] > 0) out.values[i] /= static_cast<double>(out.counts[i]);
  }
  return out;
}

FrameProbabilities detect(const Detector& model, const signal::SignalSequence& seq, const signal::WindowConfig& cfg) {
  if (seq.empty()) throw Error(ErrorCode::kEmptyInput, "cannot run detection on an empty sequence");
  return average_window_predictions(
      seq.frames(), cfg, [&](const std::vector<signal::Frames>& windows) { return model.predict_windows(windows); });
}

}  // namespace kinesis::motion

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinesis/nn/layers.hpp"
#include "kinesis/nn/lstm.hpp"
#include "kinesis/nn/optim.hpp"
#include "kinesis/signal/ops.hpp"
#include "kinesis/signal/window.hpp"
#include "kinesis/synth/generator.hpp"

namespace kinesis::motion {

inline constexpr const char* kDetectorKind = "motion-detector";

struct DetectorArch {
  int layers = 6;
  int hidden = 64;
  int input = static_cast<int>(signal::kChannels);
  friend bool operator==(const DetectorArch&, const DetectorArch&) = default;
};

struct DetectorTrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  signal::WindowConfig window;
  double validation_fraction = 0.1;  // held out for the loss curve
  std::size_t crops_per_sequence = 1;
  double clip_norm = 1.0;
};

void to_json(nlohmann::json& j, const DetectorTrainConfig& cfg);
void from_json(const nlohmann::json& j, DetectorTrainConfig& cfg);

struct TrainingRecord {
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
  std::vector<double> loss_curve;        // mean training loss per epoch
  std::vector<double> validation_curve;  // held-out loss, entry 0 before training
};

/// Stacked unidirectional LSTM with a per-frame logistic head. Holds the
/// input normalisation and the window geometry it was trained with.
class Detector {
 public:
  Detector() : Detector(DetectorArch{}, 0) {}
  Detector(const DetectorArch& arch, std::uint64_t seed);

  const DetectorArch& arch() const { return arch_; }
  const signal::NormStats& norm() const { return norm_; }
  void set_norm(const signal::NormStats& norm) { norm_ = norm; }
  const signal::WindowConfig& window() const { return window_; }
  void set_window(const signal::WindowConfig& window);
  const TrainingRecord& training() const { return training_; }
  TrainingRecord& training() { return training_; }

  nn::LstmStack<float>& lstm() { return lstm_; }
  nn::Linear<float>& head() { return head_; }

  /// Logits for `batch` already-normalised windows stacked time-major.
  nn::Matrix<float> logits(const nn::Matrix<float>& time_major, Eigen::Index batch) const;

  /// Probability per frame of one raw window. Throws kDimensionMismatch
  /// when the window does not have six channels.
  std::vector<double> predict_window(const Eigen::Ref<const Eigen::MatrixXd>& window) const;

  /// Probabilities for several raw windows of equal length.
  std::vector<std::vector<double>> predict_windows(const std::vector<signal::Frames>& windows) const;

  nn::ParameterRefs<float> parameters();
  std::vector<const nn::Parameter<float>*> parameters() const;
  std::string parameters_hash() const;

  void save(const std::filesystem::path& path) const;
  static Detector load(const std::filesystem::path& path);

 private:
  DetectorArch arch_;
  nn::LstmStack<float> lstm_;
  nn::Linear<float> head_;
  signal::NormStats norm_;
  signal::WindowConfig window_;
  TrainingRecord training_;
};

/// Mean binary cross-entropy over entries with weight > 0, from logits.
/// Writes dL/dlogit into `grad` when non-null.
template <class T>
double masked_bce(const nn::Matrix<T>& logits, const nn::Matrix<T>& targets, const nn::Matrix<T>& weights,
                  nn::Matrix<T>* grad);

/// Fits norm stats on the training split, then trains on random window crops.
/// Throws kEmptyInput for an empty dataset.
Detector train_detector(const std::vector<signal::SignalSequence>& signals,
                        const std::vector<synth::MotionMask>& masks, const DetectorTrainConfig& cfg,
                        const DetectorArch& arch = {});

/// Per-frame probability averaged over every window covering the frame,
/// plus the number of windows that contributed.
struct FrameProbabilities {
  std::vector<double> values;
  std::vector<std::uint32_t> counts;
};

using WindowPredictor = std::function<std::vector<std::vector<double>>(const std::vector<signal::Frames>&)>;

/// Slides `cfg` over `frames`, asks `predict` for zero-padded windows in
/// batches and averages the predictions of valid frames.
FrameProbabilities average_window_predictions(const signal::Frames& frames, const signal::WindowConfig& cfg,
                                              const WindowPredictor& predict, std::size_t batch = 64);

/// Throws kEmptyInput for an empty sequence.
FrameProbabilities detect(const Detector& model, const signal::SignalSequence& seq, const signal::WindowConfig& cfg);

/// Mean held-out loss over fixed crops, used to confirm that training helps.
double evaluate_loss(const Detector& model, const std::vector<signal::SignalSequence>& signals,
                     const std::vector<synth::MotionMask>& masks, const signal::WindowConfig& window,
                     std::uint64_t seed);

}  // namespace kinesis::motion

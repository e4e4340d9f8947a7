// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinesis/motion/detector.hpp"
#include "kinesis/pipeline/analyze.hpp"
#include "kinesis/quality/scorer.hpp"
#include "kinesis/recog/contrastive.hpp"
#include "kinesis/recog/encoder.hpp"
#include "kinesis/report/llm_client.hpp"
#include "kinesis/synth/generator.hpp"
#include "kinesis/synth/waveform.hpp"

namespace kinesis::cli {

struct MotionDataConfig {
  std::size_t train_sequences = 1000;
  std::size_t test_sequences = 200;
  std::size_t pool_clips_per_label = 20;
  std::size_t pool_min_frames = 100;
  std::size_t pool_max_frames = 1500;
  synth::SynthConfig generator;
};

struct ClipConfig {
  std::size_t per_label = 0;
  std::size_t min_frames = 100;
  std::size_t max_frames = 200;
};

/// Effective configuration of one run. Relative paths are resolved against
/// the directory of the config file. Every stage seed derives from `seed`.
struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path base_dir;

  MotionDataConfig motion_data;
  ClipConfig pretrain_clips{40, 100, 200};
  ClipConfig shot_clips{16, 100, 600};
  ClipConfig test_clips{25, 100, 600};
  ClipConfig scored_clips{50, 100, 600};
  ClipConfig scored_test_clips{15, 100, 600};
  std::filesystem::path session_scripts;
  std::size_t session_blend_width = 10;

  std::vector<std::string> labels;
  std::optional<std::uint64_t> text_seed;
  std::optional<std::filesystem::path> text_table;

  motion::DetectorArch detector_arch;
  motion::DetectorTrainConfig detector_train;
  recog::EncoderArch encoder_arch;
  recog::ContrastiveConfig pretrain;
  recog::ContrastiveConfig finetune;
  recog::LoraConfig lora;
  std::size_t k_shot = 16;
  quality::ScorerTrainConfig scorer_train;
  pipeline::AnalyzeConfig analyze;

  std::filesystem::path report_template;
  std::filesystem::path lesson_plan;
  std::optional<std::filesystem::path> examples;
  std::string llm = "mock";
  std::string class_id = "class";
  report::GenerationParams generation;

  /// Canonical JSON of the effective settings; hashed into the manifest.
  nlohmann::json effective;
  std::string hash;  // SHA-256 of effective.dump()
};

/// Stage indices fed to derive_seed with the run seed.
enum class Stage : std::uint64_t {
  kPool = 1,
  kMotionTrain,
  kMotionTest,
  kPretrainClips,
  kShotClips,
  kTestClips,
  kScoredClips,
  kScoredTestClips,
  kSessions,
  kDetector,
  kEncoderInit,
  kPretrain,
  kLora,
  kFinetune,
  kScorer,
  kText,
};

std::uint64_t stage_seed(const RunConfig& cfg, Stage stage);

/// Parses and validates a config file. `seed_override` replaces the file's
/// seed, `llm_override` its backend. Throws kMissingArtifact naming any
/// referenced path that does not exist and kInvalidArgument for bad values.
RunConfig load_run_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = {},
                          std::optional<std::string> llm_override = {});

}  // namespace kinesis::cli

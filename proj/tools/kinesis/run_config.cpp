// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

#include "kinesis/common/error.hpp"
#include "kinesis/common/hash.hpp"
#include "kinesis/common/rng.hpp"

namespace kinesis::cli {
namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t stage_seed(const RunConfig& cfg, Stage stage) {
  return derive_seed(cfg.seed, static_cast<std::uint64_t>(stage));
}

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, fmt::format("'{}' must be an object", where), where);
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) {
      const auto path = where.empty() ? key : where + "." + key;
      throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown config key '{}'", path), path);
    }
}

ClipConfig read_clips(const json& j, const std::string& where, ClipConfig c) {
  check_keys(j, where, {"per_label", "min_frames", "max_frames"});
  c.per_label = j.value("per_label", c.per_label);
  c.min_frames = j.value("min_frames", c.min_frames);
  c.max_frames = j.value("max_frames", c.max_frames);
  if (c.min_frames == 0 || c.min_frames > c.max_frames)
    throw Error(ErrorCode::kInvalidArgument, "invalid clip length range", where);
  return c;
}

json write_clips(const ClipConfig& c) {
  return {{"per_label", c.per_label}, {"min_frames", c.min_frames}, {"max_frames", c.max_frames}};
}

fs::path require(const RunConfig& cfg, const fs::path& p, const std::string& key) {
  const fs::path full = p.is_absolute() ? p : cfg.base_dir / p;
  if (!fs::exists(full))
    throw Error(ErrorCode::kMissingArtifact, fmt::format("{} does not exist: {}", key, full.string()), full.string());
  return full;
}

}  // namespace

RunConfig load_run_config(const fs::path& path, std::optional<std::uint64_t> seed_override,
                          std::optional<std::string> llm_override) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "config file not found", path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what(), path.string());
  }

  RunConfig c;
  c.base_dir = fs::absolute(path).parent_path();
  try {
    check_keys(j, "", {"seed", "synth", "labels", "text", "detector", "encoder", "scorer", "analyze", "report"});
    if (seed_override) {
      c.seed = *seed_override;
    } else {
      if (!j.contains("seed")) throw Error(ErrorCode::kInvalidArgument, "config must set 'seed'", "seed");
      c.seed = j.at("seed").get<std::uint64_t>();
    }

    const json synth = j.value("synth", json::object());
    check_keys(synth, "synth",
               {"motion", "pretrain_clips", "shot_clips", "test_clips", "scored_clips", "scored_test_clips",
                "sessions"});
    const json motion = synth.value("motion", json::object());
    check_keys(motion, "synth.motion",
               {"train_sequences", "test_sequences", "pool_clips_per_label", "pool_min_frames", "pool_max_frames",
                "generator"});
    auto& md = c.motion_data;
    md.train_sequences = motion.value("train_sequences", md.train_sequences);
    md.test_sequences = motion.value("test_sequences", md.test_sequences);
    md.pool_clips_per_label = motion.value("pool_clips_per_label", md.pool_clips_per_label);
    md.pool_min_frames = motion.value("pool_min_frames", md.pool_min_frames);
    md.pool_max_frames = motion.value("pool_max_frames", md.pool_max_frames);
    if (motion.contains("generator")) md.generator = motion.at("generator").get<synth::SynthConfig>();
    md.generator.seed = 0;  // per-split seeds are derived
    md.generator.validate();

    c.pretrain_clips = read_clips(synth.value("pretrain_clips", json::object()), "synth.pretrain_clips", c.pretrain_clips);
    c.shot_clips = read_clips(synth.value("shot_clips", json::object()), "synth.shot_clips", c.shot_clips);
    c.test_clips = read_clips(synth.value("test_clips", json::object()), "synth.test_clips", c.test_clips);
    c.scored_clips = read_clips(synth.value("scored_clips", json::object()), "synth.scored_clips", c.scored_clips);
    c.scored_test_clips =
        read_clips(synth.value("scored_test_clips", json::object()), "synth.scored_test_clips", c.scored_test_clips);
    const json sessions = synth.value("sessions", json::object());
    check_keys(sessions, "synth.sessions", {"scripts", "blend_width"});
    c.session_scripts = sessions.value("scripts", std::string("class_scripts.json"));
    c.session_blend_width = sessions.value("blend_width", c.session_blend_width);

    c.labels = j.value("labels", synth::pe_class_labels());

    const json text = j.value("text", json::object());
    check_keys(text, "text", {"seed", "table"});
    if (text.contains("seed")) c.text_seed = text.at("seed").get<std::uint64_t>();
    if (text.contains("table")) c.text_table = text.at("table").get<std::string>();

    const json det = j.value("detector", json::object());
    check_keys(det, "detector", {"layers", "hidden", "train"});
    c.detector_arch.layers = det.value("layers", c.detector_arch.layers);
    c.detector_arch.hidden = det.value("hidden", c.detector_arch.hidden);
    if (det.contains("train")) c.detector_train = det.at("train").get<motion::DetectorTrainConfig>();
    c.detector_train.seed = stage_seed(c, Stage::kDetector);

    const json enc = j.value("encoder", json::object());
    check_keys(enc, "encoder", {"arch", "pretrain", "finetune", "lora", "k_shot"});
    if (enc.contains("arch")) c.encoder_arch = enc.at("arch").get<recog::EncoderArch>();
    c.finetune.epochs = 30;
    c.finetune.batch_size = 16;
    if (enc.contains("pretrain")) c.pretrain = enc.at("pretrain").get<recog::ContrastiveConfig>();
    if (enc.contains("finetune")) c.finetune = enc.at("finetune").get<recog::ContrastiveConfig>();
    if (enc.contains("lora")) c.lora = enc.at("lora").get<recog::LoraConfig>();
    c.k_shot = enc.value("k_shot", c.k_shot);
    c.pretrain.seed = stage_seed(c, Stage::kPretrain);
    c.finetune.seed = stage_seed(c, Stage::kFinetune);
    c.lora.seed = stage_seed(c, Stage::kLora);
    c.pretrain.validate();
    c.finetune.validate();
    if (c.k_shot == 0 || c.k_shot > c.shot_clips.per_label)
      throw Error(ErrorCode::kInvalidArgument, "k_shot must be in [1, synth.shot_clips.per_label]", "encoder.k_shot");

    const json sc = j.value("scorer", json::object());
    check_keys(sc, "scorer", {"train"});
    c.scorer_train.epochs = 100;
    if (sc.contains("train")) c.scorer_train = sc.at("train").get<quality::ScorerTrainConfig>();
    c.scorer_train.seed = stage_seed(c, Stage::kScorer);

    if (j.contains("analyze")) c.analyze = j.at("analyze").get<pipeline::AnalyzeConfig>();

    const json rep = j.value("report", json::object());
    check_keys(rep, "report", {"template", "lesson_plan", "examples", "llm", "class_id", "params"});
    c.report_template = rep.value("template", std::string("report_template.txt"));
    c.lesson_plan = rep.value("lesson_plan", std::string("lesson_plan.json"));
    if (rep.contains("examples")) c.examples = rep.at("examples").get<std::string>();
    c.llm = rep.value("llm", c.llm);
    c.class_id = rep.value("class_id", c.class_id);
    if (rep.contains("params")) c.generation = rep.at("params").get<report::GenerationParams>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("bad config value: {}", e.what()), path.string());
  }
  if (llm_override) c.llm = *llm_override;
  if (c.llm != "mock" && c.llm != "http")
    throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown LLM backend '{}'", c.llm), "report.llm");

  json eff;
  eff["seed"] = c.seed;
  eff["synth"] = {
      {"motion",
       {{"train_sequences", c.motion_data.train_sequences},
        {"test_sequences", c.motion_data.test_sequences},
        {"pool_clips_per_label", c.motion_data.pool_clips_per_label},
        {"pool_min_frames", c.motion_data.pool_min_frames},
        {"pool_max_frames", c.motion_data.pool_max_frames},
        {"generator", c.motion_data.generator}}},
      {"pretrain_clips", write_clips(c.pretrain_clips)},
      {"shot_clips", write_clips(c.shot_clips)},
      {"test_clips", write_clips(c.test_clips)},
      {"scored_clips", write_clips(c.scored_clips)},
      {"scored_test_clips", write_clips(c.scored_test_clips)},
      {"sessions", {{"scripts", c.session_scripts.generic_string()}, {"blend_width", c.session_blend_width}}}};
  eff["labels"] = c.labels;
  eff["text"] = json::object();
  if (c.text_seed) eff["text"]["seed"] = *c.text_seed;
  if (c.text_table) eff["text"]["table"] = c.text_table->generic_string();
  eff["detector"] = {{"layers", c.detector_arch.layers}, {"hidden", c.detector_arch.hidden}, {"train", c.detector_train}};
  eff["encoder"] = {{"arch", c.encoder_arch},
                    {"pretrain", c.pretrain},
                    {"finetune", c.finetune},
                    {"lora", c.lora},
                    {"k_shot", c.k_shot}};
  eff["scorer"] = {{"train", c.scorer_train}};
  eff["analyze"] = c.analyze;
  eff["report"] = {{"template", c.report_template.generic_string()},
                   {"lesson_plan", c.lesson_plan.generic_string()},
                   {"llm", c.llm},
                   {"class_id", c.class_id},
                   {"params", c.generation}};
  if (c.examples) eff["report"]["examples"] = c.examples->generic_string();
  c.effective = eff;
  c.hash = sha256_hex(eff.dump());

  c.session_scripts = require(c, c.session_scripts, "synth.sessions.scripts");
  c.report_template = require(c, c.report_template, "report.template");
  c.lesson_plan = require(c, c.lesson_plan, "report.lesson_plan");
  if (c.examples) c.examples = require(c, *c.examples, "report.examples");
  if (c.text_table) c.text_table = require(c, *c.text_table, "text.table");
  if (c.labels.empty()) throw Error(ErrorCode::kInvalidArgument, "labels must not be empty", "labels");
  return c;
}

}  // namespace kinesis::cli

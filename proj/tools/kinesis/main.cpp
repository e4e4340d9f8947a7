// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

// kinesis: synthesize data, train the detector / encoder / scorer, analyse
// sessions and write reports. Every subcommand works inside one run directory.

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "kinesis/common/error.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitMissingArtifact = 2;
constexpr int kExitUsage = 64;

// One machine-parsable line per failure.
int fail(const std::string& code, const std::string& subject, const std::string& message, int status) {
  nlohmann::json j = {{"error", code}, {"subject", subject}, {"message", message}};
  std::cerr << j.dump() << std::endl;
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace kinesis;

  CLI::App app{"Wearable-sensor PE analytics: motion detection, activity recognition, quality scoring, reports"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kinesis 0.1.0");

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> llm;
  bool quiet = false;
  app.add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Run directory (default: runs/<timestamp>-<config hash>)");
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--llm", llm, "LLM backend")->check(CLI::IsMember({"mock", "http"}));
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  auto* synth = app.add_subcommand("synth", "Generate motion, recognition, scoring and session data");
  auto* train_md = app.add_subcommand("train-md", "Train the motion detector");
  auto* pretrain_ar = app.add_subcommand("pretrain-ar", "Contrastive pretraining of the signal encoder");
  auto* finetune_ar = app.add_subcommand("finetune-ar", "K-shot LoRA fine-tuning on the class labels");
  auto* train_aqa = app.add_subcommand("train-aqa", "Train the quality scorer");

  auto* infer = app.add_subcommand("infer", "Analyse signals into timelines and class statistics");
  std::vector<std::filesystem::path> signals;
  unsigned threads = 0;
  infer->add_option("signals", signals, "Signal CSV files (default: synthesized sessions)")->check(CLI::ExistingFile);
  infer->add_option("--threads", threads, "Concurrent sessions (0 = hardware concurrency)");

  auto* report = app.add_subcommand("report", "Write individual and class reports from timelines");
  std::vector<std::filesystem::path> timelines;
  std::optional<std::filesystem::path> plan;
  report->add_option("timelines", timelines, "Timeline JSON files (default: run timelines)")->check(CLI::ExistingFile);
  report->add_option("--plan", plan, "Lesson plan (default: from config)")->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("eval", "Evaluate every model and the full pipeline");
  std::string split = "test";
  eval->add_option("--split", split, "Data split")->check(CLI::IsMember({"test", "train"}));

  auto* all = app.add_subcommand("all", "synth, train-md, pretrain-ar, finetune-ar, train-aqa, infer, report, eval");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.get_name(), e.what(), kExitUsage);
  }

  auto logger = spdlog::stdout_color_mt("kinesis");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] %^%l%$ %v");
  spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    const auto cfg = cli::load_run_config(config_path, seed, llm);
    const auto dir = out_dir.empty() ? cli::default_run_dir(cfg) : std::filesystem::path(out_dir);
    cli::RunDirectory run(dir, cfg);
    spdlog::info("run directory {} (config {})", run.path().string(), cfg.hash.substr(0, 12));

    if (*synth || *all) cli::cmd_synth(cfg, run);
    if (*train_md || *all) cli::cmd_train_md(cfg, run);
    if (*pretrain_ar || *all) cli::cmd_pretrain_ar(cfg, run);
    if (*finetune_ar || *all) cli::cmd_finetune_ar(cfg, run);
    if (*train_aqa || *all) cli::cmd_train_aqa(cfg, run);
    if (*infer || *all) cli::cmd_infer(cfg, run, signals, threads);
    if (*report || *all) cli::cmd_report(cfg, run, timelines, plan);
    if (*eval || *all) cli::cmd_eval(cfg, run, split);
  } catch (const Error& e) {
    const int status = e.code() == ErrorCode::kMissingArtifact ? kExitMissingArtifact : kExitFailure;
    return fail(std::string(to_string(e.code())), e.subject(), e.what(), status);
  } catch (const std::exception& e) {
    return fail("internal", "", e.what(), kExitFailure);
  }
  return EXIT_SUCCESS;
}

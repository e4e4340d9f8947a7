// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "run_config.hpp"
#include "run_dir.hpp"

namespace kinesis::cli {

void cmd_synth(const RunConfig& cfg, RunDirectory& run);
void cmd_train_md(const RunConfig& cfg, RunDirectory& run);
void cmd_pretrain_ar(const RunConfig& cfg, RunDirectory& run);
void cmd_finetune_ar(const RunConfig& cfg, RunDirectory& run);
void cmd_train_aqa(const RunConfig& cfg, RunDirectory& run);

/// Analyses each signal (default: the synthesized session signals) and
/// writes `timelines/<id>.json` plus `stats/class_stats.json`.
void cmd_infer(const RunConfig& cfg, RunDirectory& run, const std::vector<std::filesystem::path>& signals,
               unsigned threads);

/// One report per timeline (default: `timelines/*.json`) and one for the class.
void cmd_report(const RunConfig& cfg, RunDirectory& run, const std::vector<std::filesystem::path>& timelines,
                const std::optional<std::filesystem::path>& plan);

/// `split` is "test" or "train"; writes `metrics/*.json`.
void cmd_eval(const RunConfig& cfg, RunDirectory& run, const std::string& split);

}  // namespace kinesis::cli

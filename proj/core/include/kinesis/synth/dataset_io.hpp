// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "kinesis/pipeline/serialize.hpp"
#include "kinesis/synth/generator.hpp"
#include "kinesis/synth/session.hpp"

namespace kinesis::synth {

/// Writes `signals/NNNNNN.csv`, `masks/NNNNNN.csv` (frame,label) and
/// `manifest.json` under `dir`.
void save_dataset(const std::filesystem::path& dir, const MotionDataset& ds);

/// Inverse of save_dataset. Throws kMissingArtifact when the manifest is
/// absent and kFormat when a mask disagrees with its signal.
MotionDataset load_dataset(const std::filesystem::path& dir);

void save_mask(const std::filesystem::path& path, const MotionMask& mask);
MotionMask load_mask(const std::filesystem::path& path);

/// Writes each student's signal to `signals/<id>.csv`, the scripts to
/// `scripts.json` and gold timelines to `triplets.json`.
void save_session_fixture(const std::filesystem::path& dir, const std::vector<SessionScript>& scripts,
                          const std::vector<SimulatedSession>& sessions);

/// Gold timelines written by save_session_fixture.
std::vector<pipeline::Timeline> load_session_gold(const std::filesystem::path& dir);

}  // namespace kinesis::synth

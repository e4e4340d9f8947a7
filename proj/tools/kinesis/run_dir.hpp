// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "run_config.hpp"

namespace kinesis::cli {

/// A run directory held under an exclusive lock for the life of the object.
/// `manifest.json` records the config hash, seed, and what each step wrote;
/// it never holds timestamps, so identical runs produce identical manifests.
class RunDirectory {
 public:
  /// Creates the directory if needed. Throws kInvalidArgument when it already
  /// belongs to a different config and kIo when another process holds it.
  RunDirectory(std::filesystem::path dir, const RunConfig& cfg);
  ~RunDirectory();
  RunDirectory(const RunDirectory&) = delete;
  RunDirectory& operator=(const RunDirectory&) = delete;

  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path data(const std::string& name) const { return dir_ / "data" / name; }
  std::filesystem::path checkpoint(const std::string& name) const { return dir_ / "checkpoints" / name; }

  /// Replaces the manifest entry for `step` and rewrites the file.
  void record(const std::string& step, nlohmann::json entry);
  /// Path relative to the run directory, with forward slashes.
  std::string relative(const std::filesystem::path& p) const;

 private:
  void write_manifest() const;

  std::filesystem::path dir_;
  nlohmann::json manifest_;
  int lock_fd_ = -1;
};

/// Default run directory: `runs/<UTC timestamp>-<first 8 hex of config hash>`.
std::filesystem::path default_run_dir(const RunConfig& cfg);

/// SHA-256 over the sorted relative paths and contents of every file below
/// `dir` (or of the file itself).
std::string tree_digest(const std::filesystem::path& dir);

}  // namespace kinesis::cli

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "run_dir.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <vector>

#include <fmt/format.h>

#include "kinesis/common/error.hpp"
#include "kinesis/common/hash.hpp"

namespace kinesis::cli {
namespace fs = std::filesystem;

RunDirectory::RunDirectory(fs::path dir, const RunConfig& cfg) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  const auto lock = dir_ / ".lock";
  lock_fd_ = ::open(lock.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
  if (lock_fd_ < 0) throw Error(ErrorCode::kIo, "cannot create run lock", lock.string());
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw Error(ErrorCode::kIo, "run directory is in use by another process", dir_.string());
  }

  const auto path = dir_ / "manifest.json";
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      in >> manifest_;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, e.what(), path.string());
    }
    const auto existing = manifest_.value("config_sha256", std::string{});
    if (existing != cfg.hash)
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("run directory belongs to config {}, not {}", existing.substr(0, 12),
                              cfg.hash.substr(0, 12)),
                  dir_.string());
  } else {
    manifest_ = {{"schema", "kinesis.manifest/1"},
                 {"config_sha256", cfg.hash},
                 {"seed", cfg.seed},
                 {"config", cfg.effective},
                 {"steps", nlohmann::json::object()}};
    write_manifest();
  }
}

RunDirectory::~RunDirectory() {
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

void RunDirectory::record(const std::string& step, nlohmann::json entry) {
  manifest_["steps"][step] = std::move(entry);
  write_manifest();
}

std::string RunDirectory::relative(const fs::path& p) const {
  return fs::relative(p, dir_).generic_string();
}

void RunDirectory::write_manifest() const {
  const auto path = dir_ / "manifest.json";
  const auto tmp = dir_ / "manifest.json.tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::kIo, "cannot write manifest", tmp.string());
    out << manifest_.dump(2) << '\n';
  }
  fs::rename(tmp, path);
}

fs::path default_run_dir(const RunConfig& cfg) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
  return fs::path("runs") / fmt::format("{}-{}", stamp, cfg.hash.substr(0, 8));
}

std::string tree_digest(const fs::path& dir) {
  if (!fs::exists(dir)) throw Error(ErrorCode::kMissingArtifact, "nothing to digest", dir.string());
  if (fs::is_regular_file(dir)) return sha256_file(dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  Sha256 h;
  for (const auto& f : files) {
    h.update(fs::relative(f, dir).generic_string());
    h.update(std::string_view("\0", 1));
    h.update(sha256_file(f));
  }
  return h.hex_digest();
}

}  // namespace kinesis::cli

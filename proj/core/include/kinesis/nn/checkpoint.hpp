// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinesis/nn/parameter.hpp"

namespace kinesis::nn {

/// Single-file model container shared by every model kind.
///
/// Layout (little-endian): 8-byte magic "KNSCKPT\0", u32 format version,
/// u64 header length + UTF-8 JSON header, u32 tensor count, then per tensor
/// u32 name length + name, u32 rows, u32 cols, u8 frozen, rows*cols float32.
struct TensorRecord {
  std::string name;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  bool frozen = false;
  std::vector<float> data;
};

class Checkpoint {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  Checkpoint() = default;
  Checkpoint(std::string kind, nlohmann::json header);

  const std::string& kind() const { return kind_; }
  nlohmann::json& header() { return header_; }
  const nlohmann::json& header() const { return header_; }
  const std::vector<TensorRecord>& tensors() const { return tensors_; }

  void add(const Parameter<float>& p);
  void add(TensorRecord record);
  bool contains(const std::string& name) const;
  const TensorRecord& tensor(const std::string& name) const;
  /// Copies a stored tensor into `p`, checking shape; restores the frozen flag.
  void restore(Parameter<float>& p) const;
  Matrix<float> matrix(const std::string& name) const;

  void save(const std::filesystem::path& path) const;
  /// Throws kFormat on bad magic/version, kMissingArtifact when absent.
  /// `expected_kind` empty accepts any kind.
  static Checkpoint load(const std::filesystem::path& path, const std::string& expected_kind = {});

 private:
  std::string kind_;
  nlohmann::json header_;
  std::vector<TensorRecord> tensors_;
};

}  // namespace kinesis::nn

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace kinesis::nn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'K', 'N', 'S', 'C', 'K', 'P', 'T', '\0'};

template <class U>
void write_pod(std::ostream& out, U value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(U));
}

template <class U>
U read_pod(std::istream& in, const std::string& path) {
  U value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(U))) {
    throw Error(ErrorCode::kFormat, "truncated checkpoint " + path, path);
  }
  return value;
}

std::string read_string(std::istream& in, std::size_t len, const std::string& path) {
  std::string s(len, '\0');
  if (len > 0 && !in.read(s.data(), static_cast<std::streamsize>(len))) {
    throw Error(ErrorCode::kFormat, "truncated checkpoint " + path, path);
  }
  return s;
}

}  // namespace

Checkpoint::Checkpoint(std::string kind, nlohmann::json header)
    : kind_(std::move(kind)), header_(std::move(header)) {}

void Checkpoint::add(const Parameter<float>& p) {
  TensorRecord r;
  r.name = p.name();
  r.rows = static_cast<std::uint32_t>(p.rows());
  r.cols = static_cast<std::uint32_t>(p.cols());
  r.frozen = p.frozen();
  r.data.assign(p.value().data(), p.value().data() + p.size());
  add(std::move(r));
}

void Checkpoint::add(TensorRecord record) {
  if (contains(record.name)) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate tensor " + record.name, record.name);
  }
  tensors_.push_back(std::move(record));
}

bool Checkpoint::contains(const std::string& name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return true;
  }
  return false;
}

const TensorRecord& Checkpoint::tensor(const std::string& name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return t;
  }
  throw Error(ErrorCode::kFormat, "checkpoint has no tensor '" + name + "'", name);
}

Matrix<float> Checkpoint::matrix(const std::string& name) const {
  const auto& t = tensor(name);
  Matrix<float> m(t.rows, t.cols);
  std::memcpy(m.data(), t.data.data(), t.data.size() * sizeof(float));
  return m;
}

void Checkpoint::restore(Parameter<float>& p) const {
  const auto& t = tensor(p.name());
  if (t.rows != p.rows() || t.cols != p.cols()) {
    throw Error(ErrorCode::kFormat, "shape mismatch for tensor '" + p.name() + "'", p.name());
  }
  p.set_frozen(false);
  std::memcpy(p.mutable_value().data(), t.data.data(), t.data.size() * sizeof(float));
  p.set_frozen(t.frozen);
}

void Checkpoint::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write checkpoint " + path.string(), path.string());
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, kFormatVersion);
  nlohmann::json full = header_;
  full["kind"] = kind_;
  const std::string header = full.dump();
  write_pod<std::uint64_t>(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(tensors_.size()));
  for (const auto& t : tensors_) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    write_pod<std::uint32_t>(out, t.rows);
    write_pod<std::uint32_t>(out, t.cols);
    write_pod<std::uint8_t>(out, t.frozen ? 1 : 0);
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  }
}

Checkpoint Checkpoint::load(const std::filesystem::path& path, const std::string& expected_kind) {
  const std::string p = path.string();
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::kMissingArtifact, "checkpoint not found: " + p, p);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open checkpoint " + p, p);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kFormat, p + " is not a kinesis checkpoint", p);
  }
  const auto version = read_pod<std::uint32_t>(in, p);
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kFormat, "unsupported checkpoint version " + std::to_string(version), p);
  }
  const auto header_len = read_pod<std::uint64_t>(in, p);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(read_string(in, header_len, p));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, "corrupt checkpoint header in " + p + ": " + e.what(), p);
  }
  Checkpoint ckpt(header.value("kind", std::string{}), header);
  ckpt.header_.erase("kind");
  if (!expected_kind.empty() && ckpt.kind_ != expected_kind) {
    throw Error(ErrorCode::kFormat, p + " holds a '" + ckpt.kind_ + "' model, expected '" + expected_kind + "'", p);
  }
  const auto count = read_pod<std::uint32_t>(in, p);
  for (std::uint32_t i = 0; i < count; ++i) {
    TensorRecord t;
    t.name = read_string(in, read_pod<std::uint32_t>(in, p), p);
    t.rows = read_pod<std::uint32_t>(in, p);
    t.cols = read_pod<std::uint32_t>(in, p);
    t.frozen = read_pod<std::uint8_t>(in, p) != 0;
    t.data.resize(static_cast<std::size_t>(t.rows) * t.cols);
    if (!in.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(float)))) {
      throw Error(ErrorCode::kFormat, "truncated checkpoint " + p, p);
    }
    ckpt.tensors_.push_back(std::move(t));
  }
  return ckpt;
}

}  // namespace kinesis::nn

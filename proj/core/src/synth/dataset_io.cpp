// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/synth/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "kinesis/common/error.hpp"
#include "kinesis/pipeline/serialize.hpp"
#include "kinesis/signal/csv.hpp"

namespace kinesis::synth {

namespace fs = std::filesystem;

namespace {

std::string index_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", i);
  return buf;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file", path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "file not found", path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, e.what(), path.string());
  }
}

}  // namespace

void save_mask(const fs::path& path, const MotionMask& mask) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write mask", path.string());
  out << "frame,label\n";
  for (std::size_t i = 0; i < mask.size(); ++i) out << i << ',' << static_cast<int>(mask[i]) << '\n';
}

MotionMask load_mask(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "mask not found", path.string());
  std::string line;
  std::getline(in, line);
  if (line != "frame,label") throw Error(ErrorCode::kParse, "bad mask header", path.string() + ":1");
  MotionMask mask;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (comma == std::string::npos) throw Error(ErrorCode::kParse, "expected frame,label", where);
    const std::string frame = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    if (frame != std::to_string(mask.size())) throw Error(ErrorCode::kParse, "frames out of order", where);
    if (value != "0" && value != "1") throw Error(ErrorCode::kParse, "mask label must be 0 or 1", where);
    mask.push_back(value == "1" ? 1 : 0);
  }
  return mask;
}

void save_dataset(const fs::path& dir, const MotionDataset& ds) {
  fs::create_directories(dir / "signals");
  fs::create_directories(dir / "masks");
  for (std::size_t i = 0; i < ds.signals.size(); ++i) {
    const std::string name = index_name(i);
    signal::save_signal(dir / "signals" / (name + ".csv"), ds.signals[i]);
    save_mask(dir / "masks" / (name + ".csv"), ds.masks[i]);
  }
  nlohmann::json manifest = {{"format", "kinesis-motion-dataset"},
                             {"version", 1},
                             {"count", ds.signals.size()},
                             {"config", ds.config},
                             {"seed", ds.config.seed},
                             {"summary", ds.summary}};
  write_json(dir / "manifest.json", manifest);
}

MotionDataset load_dataset(const fs::path& dir) {
  const auto manifest = read_json(dir / "manifest.json");
  MotionDataset ds;
  std::size_t count = 0;
  try {
    ds.config = manifest.at("config").get<SynthConfig>();
    count = manifest.at("count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, e.what(), (dir / "manifest.json").string());
  }
  for (std::size_t i = 0; i < count; ++i) {
    const std::string name = index_name(i);
    auto seq = signal::load_signal(dir / "signals" / (name + ".csv"));
    auto mask = load_mask(dir / "masks" / (name + ".csv"));
    if (mask.size() != seq.size()) {
      throw Error(ErrorCode::kFormat, "mask length differs from signal length", name);
    }
    ds.signals.push_back(std::move(seq));
    ds.masks.push_back(std::move(mask));
  }
  ds.summary = summarize(ds.signals, ds.masks);
  return ds;
}

void save_session_fixture(const fs::path& dir, const std::vector<SessionScript>& scripts,
                          const std::vector<SimulatedSession>& sessions) {
  if (scripts.size() != sessions.size()) {
    throw Error(ErrorCode::kInvalidArgument, "scripts and sessions differ in count");
  }
  fs::create_directories(dir / "signals");
  nlohmann::json timelines = nlohmann::json::array();
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    signal::save_signal(dir / "signals" / (scripts[i].student_id + ".csv"), sessions[i].signal);
    timelines.push_back(pipeline::to_json(
        pipeline::Timeline{scripts[i].student_id, sessions[i].signal.rate(), sessions[i].triplets,
                           static_cast<double>(sessions[i].signal.size()) / sessions[i].signal.rate()}));
  }
  write_json(dir / "scripts.json", scripts);
  write_json(dir / "triplets.json", timelines);
}

std::vector<pipeline::Timeline> load_session_gold(const fs::path& dir) {
  const auto path = dir / "triplets.json";
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "session gold timelines not found", path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, e.what(), path.string());
  }
  std::vector<pipeline::Timeline> out;
  for (const auto& t : j) out.push_back(pipeline::timeline_from_json(t));
  return out;
}

}  // namespace kinesis::synth

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinesis/pipeline/stats.hpp"
#include "kinesis/pipeline/triplet.hpp"

namespace kinesis::pipeline {

inline constexpr const char* kTimelineSchema = "kinesis.timeline/1";
inline constexpr const char* kClassStatsSchema = "kinesis.class_stats/1";

/// Per-student list of triplets as exchanged on disk.
struct Timeline {
  std::string student_id;
  double rate_hz = 50.0;
  std::vector<ActionTriplet> triplets;
  double duration_s = 0.0;  // session length; 0 when unknown and then not written
  friend bool operator==(const Timeline&, const Timeline&) = default;
};

/// Interval times are written rounded to 0.01 s, which is exact for
/// triplets aligned to 50 Hz frames. Scores keep full precision.
double round_centiseconds(double seconds);

nlohmann::json to_json(const ActionTriplet& t);
nlohmann::json to_json(const Timeline& t);
nlohmann::json to_json(const StudentStats& s);
nlohmann::json to_json(const ClassStats& c);

/// Readers throw kSchemaViolation whose subject is the JSON path of the
/// offending field, e.g. `triplets[3].score`.
ActionTriplet triplet_from_json(const nlohmann::json& j, const std::string& path = "");
Timeline timeline_from_json(const nlohmann::json& j);
StudentStats student_stats_from_json(const nlohmann::json& j, const std::string& path = "");
ClassStats class_stats_from_json(const nlohmann::json& j);

void save_timeline(const std::filesystem::path& path, const Timeline& t);
Timeline load_timeline(const std::filesystem::path& path);
void save_class_stats(const std::filesystem::path& path, const ClassStats& c);
ClassStats load_class_stats(const std::filesystem::path& path);

}  // namespace kinesis::pipeline

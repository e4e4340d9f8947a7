// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/pipeline/serialize.hpp"

#include <cmath>
#include <fstream>

#include "kinesis/common/error.hpp"

namespace kinesis::pipeline {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

[[noreturn]] void violation(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kSchemaViolation, msg, path);
}

const json& field(const json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) violation(path.empty() ? "$" : path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) violation(join(path, key), "missing field");
  return *it;
}

double number(const json& j, const std::string& path, const std::string& key) {
  const auto& v = field(j, path, key);
  if (!v.is_number()) violation(join(path, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) violation(join(path, key), "expected a finite number");
  return d;
}

std::size_t count(const json& j, const std::string& path, const std::string& key) {
  const auto& v = field(j, path, key);
  if (!v.is_number_unsigned()) violation(join(path, key), "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::string text(const json& j, const std::string& path, const std::string& key) {
  const auto& v = field(j, path, key);
  if (!v.is_string()) violation(join(path, key), "expected a string");
  return v.get<std::string>();
}

const json& array(const json& j, const std::string& path, const std::string& key) {
  const auto& v = field(j, path, key);
  if (!v.is_array()) violation(join(path, key), "expected an array");
  return v;
}

const json& object(const json& j, const std::string& path, const std::string& key) {
  const auto& v = field(j, path, key);
  if (!v.is_object()) violation(join(path, key), "expected an object");
  return v;
}

void expect_schema(const json& j, const char* schema) {
  const std::string got = text(j, "", "schema");
  if (got != schema) violation("schema", "unsupported schema '" + got + "'");
}

json triplets_json(const std::vector<ActionTriplet>& ts) {
  json out = json::array();
  for (const auto& t : ts) out.push_back(to_json(t));
  return out;
}

std::vector<ActionTriplet> triplets_from(const json& j, const std::string& path) {
  std::vector<ActionTriplet> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(triplet_from_json(j[i], index(path, i)));
  return out;
}

void write(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file", path.string());
  out << j.dump(2) << '\n';
}

json read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "file not found", path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what(), path.string());
  }
}

}  // namespace

double round_centiseconds(double seconds) { return std::round(seconds * 100.0) / 100.0; }

json to_json(const ActionTriplet& t) {
  json j = {{"start_s", round_centiseconds(t.start_s)},
            {"end_s", round_centiseconds(t.end_s)},
            {"label", t.label},
            {"score", t.score}};
  if (t.low_confidence) j["low_confidence"] = true;
  return j;
}

json to_json(const Timeline& t) {
  json j = {{"schema", kTimelineSchema},
            {"student_id", t.student_id},
            {"rate_hz", t.rate_hz},
            {"triplets", triplets_json(t.triplets)}};
  if (t.duration_s > 0.0) j["duration_s"] = t.duration_s;
  return j;
}

json to_json(const StudentStats& s) {
  json labels = json::object();
  for (const auto& [label, ls] : s.labels) {
    labels[label] = {{"count", ls.count}, {"total_duration_s", ls.total_duration_s}, {"mean_score", ls.mean_score}};
  }
  return {{"student_id", s.student_id},
          {"session_duration_s", s.session_duration_s},
          {"active_fraction", s.active_fraction},
          {"labels", labels},
          {"triplets", triplets_json(s.triplets)}};
}

json to_json(const ClassStats& c) {
  json students = json::array();
  for (const auto& s : c.students) students.push_back(to_json(s));
  json labels = json::object();
  for (const auto& [label, a] : c.aggregates.labels) {
    labels[label] = {{"students", a.students},
                     {"mean_count", a.mean_count},
                     {"mean_duration_s", a.mean_duration_s},
                     {"mean_score", a.mean_score}};
  }
  return {{"schema", kClassStatsSchema},
          {"students", students},
          {"class_aggregates",
           {{"labels", labels},
            {"participation_ranking", c.aggregates.participation_ranking},
            {"mean_active_fraction", c.aggregates.mean_active_fraction}}}};
}

ActionTriplet triplet_from_json(const json& j, const std::string& path) {
  ActionTriplet t;
  t.start_s = number(j, path, "start_s");
  t.end_s = number(j, path, "end_s");
  t.label = text(j, path, "label");
  t.score = number(j, path, "score");
  if (const auto it = j.find("low_confidence"); it != j.end()) {
    if (!it->is_boolean()) violation(join(path, "low_confidence"), "expected a boolean");
    t.low_confidence = it->get<bool>();
  }
  try {
    validate(t);
  } catch (const Error& e) {
    violation(join(path, e.subject()), e.what());
  }
  return t;
}

Timeline timeline_from_json(const json& j) {
  expect_schema(j, kTimelineSchema);
  Timeline t;
  t.student_id = text(j, "", "student_id");
  t.rate_hz = number(j, "", "rate_hz");
  if (!(t.rate_hz > 0.0)) violation("rate_hz", "rate must be positive");
  t.triplets = triplets_from(array(j, "", "triplets"), "triplets");
  if (!is_ordered_disjoint(t.triplets)) violation("triplets", "triplets overlap or are out of order");
  if (j.contains("duration_s")) {
    t.duration_s = number(j, "", "duration_s");
    if (!(t.duration_s > 0.0)) violation("duration_s", "duration must be positive");
  }
  return t;
}

StudentStats student_stats_from_json(const json& j, const std::string& path) {
  StudentStats s;
  s.student_id = text(j, path, "student_id");
  s.session_duration_s = number(j, path, "session_duration_s");
  s.active_fraction = number(j, path, "active_fraction");
  if (s.active_fraction < 0.0 || s.active_fraction > 1.0) {
    violation(join(path, "active_fraction"), "active fraction outside [0, 1]");
  }
  const auto& labels = object(j, path, "labels");
  const std::string lpath = join(path, "labels");
  for (const auto& [label, v] : labels.items()) {
    const std::string p = join(lpath, label);
    LabelStats ls;
    ls.count = count(v, p, "count");
    ls.total_duration_s = number(v, p, "total_duration_s");
    if (ls.total_duration_s < 0.0) violation(join(p, "total_duration_s"), "duration must be non-negative");
    ls.mean_score = number(v, p, "mean_score");
    s.labels.emplace(label, ls);
  }
  s.triplets = triplets_from(array(j, path, "triplets"), join(path, "triplets"));
  return s;
}

ClassStats class_stats_from_json(const json& j) {
  expect_schema(j, kClassStatsSchema);
  ClassStats c;
  const auto& students = array(j, "", "students");
  for (std::size_t i = 0; i < students.size(); ++i) {
    c.students.push_back(student_stats_from_json(students[i], index("students", i)));
  }
  const auto& agg = object(j, "", "class_aggregates");
  const auto& labels = object(agg, "class_aggregates", "labels");
  for (const auto& [label, v] : labels.items()) {
    const std::string p = "class_aggregates.labels." + label;
    LabelAggregate a;
    a.students = count(v, p, "students");
    a.mean_count = number(v, p, "mean_count");
    a.mean_duration_s = number(v, p, "mean_duration_s");
    a.mean_score = number(v, p, "mean_score");
    c.aggregates.labels.emplace(label, a);
  }
  const auto& ranking = array(agg, "class_aggregates", "participation_ranking");
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (!ranking[i].is_string()) violation(index("class_aggregates.participation_ranking", i), "expected a string");
    c.aggregates.participation_ranking.push_back(ranking[i].get<std::string>());
  }
  c.aggregates.mean_active_fraction = number(agg, "class_aggregates", "mean_active_fraction");
  return c;
}

void save_timeline(const std::filesystem::path& path, const Timeline& t) { write(path, to_json(t)); }
Timeline load_timeline(const std::filesystem::path& path) { return timeline_from_json(read(path)); }
void save_class_stats(const std::filesystem::path& path, const ClassStats& c) { write(path, to_json(c)); }
ClassStats load_class_stats(const std::filesystem::path& path) { return class_stats_from_json(read(path)); }

}  // namespace kinesis::pipeline

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "kinesis/pipeline/triplet.hpp"

namespace kinesis::pipeline {

struct LabelStats {
  std::size_t count = 0;
  double total_duration_s = 0.0;
  double mean_score = 0.0;
  friend bool operator==(const LabelStats&, const LabelStats&) = default;
};

struct StudentStats {
  std::string student_id;
  std::vector<ActionTriplet> triplets;
  std::map<std::string, LabelStats> labels;
  double active_fraction = 0.0;
  double session_duration_s = 0.0;
  friend bool operator==(const StudentStats&, const StudentStats&) = default;
};

/// Class-level view of one label over the students who performed it.
struct LabelAggregate {
  std::size_t students = 0;
  double mean_count = 0.0;
  double mean_duration_s = 0.0;
  double mean_score = 0.0;
  friend bool operator==(const LabelAggregate&, const LabelAggregate&) = default;
};

struct ClassAggregates {
  std::map<std::string, LabelAggregate> labels;
  std::vector<std::string> participation_ranking;  // active fraction descending, ties by id
  double mean_active_fraction = 0.0;
  friend bool operator==(const ClassAggregates&, const ClassAggregates&) = default;
};

struct ClassStats {
  std::vector<StudentStats> students;
  ClassAggregates aggregates;
  friend bool operator==(const ClassStats&, const ClassStats&) = default;
};

/// Throws kOutOfBounds for a triplet outside [0, session_duration_s].
StudentStats aggregate_student(const std::string& student_id, std::vector<ActionTriplet> triplets,
                               double session_duration_s);

/// Throws kEmptyInput for no students and kDuplicateId for repeated ids.
ClassStats aggregate_class(std::vector<StudentStats> students);

}  // namespace kinesis::pipeline

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/pipeline/stats.hpp"

#include <algorithm>
#include <set>

#include "kinesis/common/error.hpp"

namespace kinesis::pipeline {

namespace {
constexpr double kBoundsSlack = 1e-9;
}

StudentStats aggregate_student(const std::string& student_id, std::vector<ActionTriplet> triplets,
                               double session_duration_s) {
  if (!(session_duration_s >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "session duration must be non-negative", student_id);
  }
  StudentStats s;
  s.student_id = student_id;
  s.session_duration_s = session_duration_s;
  double active = 0.0;
  std::map<std::string, double> score_sums;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const auto& t = triplets[i];
    validate(t);
    if (t.end_s > session_duration_s + kBoundsSlack) {
      throw Error(ErrorCode::kOutOfBounds, "triplet ends after the session",
                  student_id + ".triplets[" + std::to_string(i) + "]");
    }
    auto& ls = s.labels[t.label];
    ++ls.count;
    ls.total_duration_s += t.duration();
    score_sums[t.label] += t.score;
    active += t.duration();
  }
  for (auto& [label, ls] : s.labels) ls.mean_score = score_sums[label] / static_cast<double>(ls.count);
  s.active_fraction = session_duration_s > 0.0 ? std::clamp(active / session_duration_s, 0.0, 1.0) : 0.0;
  s.triplets = std::move(triplets);
  return s;
}

ClassStats aggregate_class(std::vector<StudentStats> students) {
  if (students.empty()) throw Error(ErrorCode::kEmptyInput, "class has no students");
  std::set<std::string> seen;
  for (const auto& s : students) {
    if (!seen.insert(s.student_id).second) throw Error(ErrorCode::kDuplicateId, "duplicate student id", s.student_id);
  }
  ClassStats c;
  auto& agg = c.aggregates;
  double fraction_sum = 0.0;
  for (const auto& s : students) {
    fraction_sum += s.active_fraction;
    for (const auto& [label, ls] : s.labels) {
      auto& a = agg.labels[label];
      ++a.students;
      a.mean_count += static_cast<double>(ls.count);
      a.mean_duration_s += ls.total_duration_s;
      a.mean_score += ls.mean_score;
    }
  }
  for (auto& [_, a] : agg.labels) {
    const auto n = static_cast<double>(a.students);
    a.mean_count /= n;
    a.mean_duration_s /= n;
    a.mean_score /= n;
  }
  agg.mean_active_fraction = fraction_sum / static_cast<double>(students.size());

  std::vector<const StudentStats*> order;
  for (const auto& s : students) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const StudentStats* a, const StudentStats* b) {
    if (a->active_fraction != b->active_fraction) return a->active_fraction > b->active_fraction;
    return a->student_id < b->student_id;
  });
  for (const auto* s : order) agg.participation_ranking.push_back(s->student_id);
  c.students = std::move(students);
  return c;
}

}  // namespace kinesis::pipeline

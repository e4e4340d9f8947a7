// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinesis/pipeline/stats.hpp"
#include "kinesis/report/template.hpp"

namespace kinesis::report {

enum class Audience { kTeacher, kStudent };

std::string to_string(Audience a);
/// Throws kInvalidArgument for anything but "teacher" or "student".
Audience audience_from_string(const std::string& s);

struct LessonPhase {
  std::string name;
  std::string label;  // intended activity
  double duration_min = 0.0;
  friend bool operator==(const LessonPhase&, const LessonPhase&) = default;
};

struct LessonPlan {
  std::string course_title;
  std::vector<std::string> objectives;
  std::vector<LessonPhase> phases;

  /// Throws kInvalidArgument naming the first phase without a positive duration.
  void validate() const;
  friend bool operator==(const LessonPlan&, const LessonPlan&) = default;
};

void to_json(nlohmann::json& j, const LessonPlan& p);
void from_json(const nlohmann::json& j, LessonPlan& p);
LessonPlan load_lesson_plan(const std::filesystem::path& path);

/// Slots the builders fill; a template may use any subset.
namespace slot {
inline constexpr const char* kCourseContext = "course_context";
inline constexpr const char* kLessonPlan = "lesson_plan";
inline constexpr const char* kTripletTable = "triplet_table";
inline constexpr const char* kAggregates = "aggregates";
inline constexpr const char* kAudience = "audience";
inline constexpr const char* kExamples = "examples";
inline constexpr const char* kOutputFormat = "output_format";
}  // namespace slot

/// Top-level headings every generated report carries.
const std::vector<std::string>& report_headings();

/// `#<index> | <start>-<end> s | <label> | score <s>`; the index makes each
/// row unique within a table.
std::string format_triplet(std::size_t index, const pipeline::ActionTriplet& t);
std::string format_triplet_table(const std::vector<pipeline::ActionTriplet>& triplets);
std::string format_lesson_plan(const LessonPlan& plan);
std::string format_student_aggregates(const pipeline::StudentStats& stats);
/// One `Student <id>:` line per student, in participation-ranking order.
std::string format_student_summaries(const pipeline::ClassStats& stats);
std::string format_class_aggregates(const pipeline::ClassStats& stats);
/// Empty for no examples.
std::string format_examples(const std::vector<std::string>& examples);
std::string output_format_instructions(Audience audience);

/// Fills only the slots the template declares. Throws kMissingSlot when the
/// template needs a slot the builders do not provide.
std::string build_individual_prompt(const PromptTemplate& tmpl, const LessonPlan& plan,
                                    const pipeline::StudentStats& stats, const std::vector<std::string>& examples,
                                    Audience audience = Audience::kStudent);

std::string build_class_prompt(const PromptTemplate& tmpl, const LessonPlan& plan,
                               const pipeline::ClassStats& stats, const std::vector<std::string>& examples);

/// Reads expert report excerpts: every `.md` or `.txt` file in a directory,
/// sorted by name, or a single file.
std::vector<std::string> load_examples(const std::filesystem::path& path);

}  // namespace kinesis::report

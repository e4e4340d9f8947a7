// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/report/prompt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "kinesis/common/error.hpp"

namespace kinesis::report {

std::string to_string(Audience a) { return a == Audience::kTeacher ? "teacher" : "student"; }

Audience audience_from_string(const std::string& s) {
  if (s == "teacher") return Audience::kTeacher;
  if (s == "student") return Audience::kStudent;
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown audience '{}'", s), "audience");
}

void LessonPlan::validate() const {
  for (std::size_t i = 0; i < phases.size(); ++i)
    if (!(phases[i].duration_min > 0.0))
      throw Error(ErrorCode::kInvalidArgument, fmt::format("phase '{}' needs a positive duration", phases[i].name),
                  fmt::format("phases[{}].duration_min", i));
}

void to_json(nlohmann::json& j, const LessonPlan& p) {
  j = {{"course_title", p.course_title}, {"objectives", p.objectives}, {"phases", nlohmann::json::array()}};
  for (const auto& ph : p.phases)
    j["phases"].push_back({{"name", ph.name}, {"label", ph.label}, {"duration_min", ph.duration_min}});
}

void from_json(const nlohmann::json& j, LessonPlan& p) {
  p = LessonPlan{};
  p.course_title = j.at("course_title").get<std::string>();
  p.objectives = j.value("objectives", std::vector<std::string>{});
  for (const auto& ph : j.value("phases", nlohmann::json::array()))
    p.phases.push_back({ph.at("name").get<std::string>(), ph.value("label", std::string{}),
                        ph.at("duration_min").get<double>()});
  p.validate();
}

LessonPlan load_lesson_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open lesson plan", path.string());
  try {
    return nlohmann::json::parse(in).get<LessonPlan>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, e.what(), path.string());
  }
}

const std::vector<std::string>& report_headings() {
  static const std::vector<std::string> headings = {"Physical Exertion", "Learning Quality", "Psychological Factors",
                                                    "Recommendations"};
  return headings;
}

std::string format_triplet(std::size_t index, const pipeline::ActionTriplet& t) {
  auto s = fmt::format("#{} | {:.2f}-{:.2f} s | {} | score {:.2f}", index, t.start_s, t.end_s, t.label, t.score);
  if (t.low_confidence) s += " | low confidence";
  return s;
}

std::string format_triplet_table(const std::vector<pipeline::ActionTriplet>& triplets) {
  if (triplets.empty()) return "(no actions detected)";
  std::string out = "index | interval | action | quality score (0-5)";
  for (std::size_t i = 0; i < triplets.size(); ++i) out += "\n" + format_triplet(i + 1, triplets[i]);
  return out;
}

std::string format_lesson_plan(const LessonPlan& plan) {
  std::string out = fmt::format("Course: {}", plan.course_title);
  if (!plan.objectives.empty()) {
    out += "\nObjectives:";
    for (const auto& o : plan.objectives) out += "\n- " + o;
  }
  if (!plan.phases.empty()) {
    out += "\nSchedule:";
    for (std::size_t i = 0; i < plan.phases.size(); ++i) {
      const auto& ph = plan.phases[i];
      out += fmt::format("\n{}. {} ({:g} min)", i + 1, ph.name, ph.duration_min);
      if (!ph.label.empty()) out += fmt::format(", practising {}", ph.label);
    }
  }
  return out;
}

std::string format_student_aggregates(const pipeline::StudentStats& s) {
  std::string out = fmt::format("Session duration: {:.2f} s\nActive fraction: {:.1f}%\nActions: {}",
                                s.session_duration_s, 100.0 * s.active_fraction, s.triplets.size());
  for (const auto& [label, ls] : s.labels)
    out += fmt::format("\n- {}: {} times, {:.2f} s total, mean score {:.2f}", label, ls.count, ls.total_duration_s,
                       ls.mean_score);
  return out;
}

std::string format_student_summaries(const pipeline::ClassStats& stats) {
  std::string out;
  for (const auto& id : stats.aggregates.participation_ranking) {
    const auto it = std::find_if(stats.students.begin(), stats.students.end(),
                                 [&](const pipeline::StudentStats& s) { return s.student_id == id; });
    if (it == stats.students.end()) continue;
    if (!out.empty()) out += '\n';
    out += fmt::format("Student {}: active {:.1f}% of {:.2f} s, {} actions", id, 100.0 * it->active_fraction,
                       it->session_duration_s, it->triplets.size());
    std::vector<std::string> parts;
    for (const auto& [label, ls] : it->labels)
      parts.push_back(fmt::format("{} x{} (mean score {:.2f})", label, ls.count, ls.mean_score));
    if (!parts.empty()) out += "; " + fmt::format("{}", fmt::join(parts, ", "));
  }
  return out;
}

std::string format_class_aggregates(const pipeline::ClassStats& stats) {
  const auto& a = stats.aggregates;
  std::string out = fmt::format("Students: {}\nMean active fraction: {:.1f}%", stats.students.size(),
                                100.0 * a.mean_active_fraction);
  for (const auto& [label, la] : a.labels)
    out += fmt::format("\n- {}: {} students, mean {:.2f} times, mean {:.2f} s, mean score {:.2f}", label,
                       la.students, la.mean_count, la.mean_duration_s, la.mean_score);
  out += fmt::format("\nParticipation ranking: {}", fmt::join(a.participation_ranking, " > "));
  return out;
}

std::string format_examples(const std::vector<std::string>& examples) {
  std::string out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (i) out += "\n\n";
    out += fmt::format("Example {}:\n{}", i + 1, examples[i]);
  }
  return out;
}

std::string output_format_instructions(Audience audience) {
  std::string out = fmt::format("Write Markdown for a {} with exactly these top-level headings, in order:",
                                to_string(audience));
  for (const auto& h : report_headings()) out += "\n# " + h;
  return out;
}

namespace {

std::string render_with(const PromptTemplate& tmpl, const SlotMap& available) {
  SlotMap used;
  for (const auto& name : tmpl.slots()) {
    const auto it = available.find(name);
    if (it == available.end())
      throw Error(ErrorCode::kMissingSlot, fmt::format("no value for slot '{}'", name), name);
    used.insert(*it);
  }
  return render_prompt(tmpl, used);
}

}  // namespace

std::string build_individual_prompt(const PromptTemplate& tmpl, const LessonPlan& plan,
                                    const pipeline::StudentStats& stats, const std::vector<std::string>& examples,
                                    Audience audience) {
  for (const auto& t : stats.triplets) pipeline::validate(t);
  const SlotMap slots = {
      {slot::kCourseContext, fmt::format("{}; individual report for student {}", plan.course_title, stats.student_id)},
      {slot::kLessonPlan, format_lesson_plan(plan)},
      {slot::kTripletTable, format_triplet_table(stats.triplets)},
      {slot::kAggregates, format_student_aggregates(stats)},
      {slot::kAudience, to_string(audience)},
      {slot::kExamples, format_examples(examples)},
      {slot::kOutputFormat, output_format_instructions(audience)},
  };
  return render_with(tmpl, slots);
}

std::string build_class_prompt(const PromptTemplate& tmpl, const LessonPlan& plan,
                               const pipeline::ClassStats& stats, const std::vector<std::string>& examples) {
  const SlotMap slots = {
      {slot::kCourseContext,
       fmt::format("{}; class report covering {} students", plan.course_title, stats.students.size())},
      {slot::kLessonPlan, format_lesson_plan(plan)},
      {slot::kTripletTable, format_student_summaries(stats)},
      {slot::kAggregates, format_class_aggregates(stats)},
      {slot::kAudience, to_string(Audience::kTeacher)},
      {slot::kExamples, format_examples(examples)},
      {slot::kOutputFormat, output_format_instructions(Audience::kTeacher)},
  };
  return render_with(tmpl, slots);
}

std::vector<std::string> load_examples(const std::filesystem::path& path) {
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open example", p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    auto text = ss.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
  };
  if (!std::filesystem::is_directory(path)) return {read(path)};
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(path))
    if (e.is_regular_file() && (e.path().extension() == ".md" || e.path().extension() == ".txt"))
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::string> out;
  for (const auto& f : files) out.push_back(read(f));
  return out;
}

}  // namespace kinesis::report

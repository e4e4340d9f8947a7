// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "kinesis/pipeline/stats.hpp"
#include "kinesis/report/llm_client.hpp"
#include "kinesis/report/prompt.hpp"

namespace {

using namespace kinesis;

constexpr const char* kTemplate =
    "## Section: Context\n{{course_context}}\n{{lesson_plan}}\n{{triplet_table}}\n"
    "## Section: Objective\n{{aggregates}}\n"
    "## Section: Style\n{{examples}}\n"
    "## Section: Audience\n{{audience}}\n"
    "## Section: Response\n{{output_format}}\n";

pipeline::StudentStats student(std::size_t triplets) {
  std::vector<pipeline::ActionTriplet> ts;
  for (std::size_t i = 0; i < triplets; ++i)
    ts.push_back({10.0 * static_cast<double>(i), 10.0 * static_cast<double>(i) + 6.0,
                  i % 2 ? "dribbling" : "shooting", 3.25, false});
  return pipeline::aggregate_student("s01", ts, 10.0 * static_cast<double>(triplets) + 10.0);
}

void BM_BuildIndividualPrompt(benchmark::State& state) {
  const auto tmpl = report::PromptTemplate::parse(kTemplate);
  const auto stats = student(static_cast<std::size_t>(state.range(0)));
  const report::LessonPlan plan{"Basketball", {"Dribble"}, {{"Drill", "dribbling", 10}}};
  for (auto _ : state) benchmark::DoNotOptimize(report::build_individual_prompt(tmpl, plan, stats, {}));
}
BENCHMARK(BM_BuildIndividualPrompt)->Arg(20)->Arg(200);

void BM_MockCompletion(benchmark::State& state) {
  const auto tmpl = report::PromptTemplate::parse(kTemplate);
  const report::LessonPlan plan{"Basketball", {"Dribble"}, {{"Drill", "dribbling", 10}}};
  const auto prompt = report::build_individual_prompt(tmpl, plan, student(50), {});
  report::MockClient client;
  for (auto _ : state) benchmark::DoNotOptimize(client.complete(prompt, {}));
}
BENCHMARK(BM_MockCompletion);

}  // namespace

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "kinesis/report/llm_client.hpp"
#include "kinesis/report/prompt.hpp"

namespace kinesis::report {

struct Report {
  Audience audience = Audience::kStudent;
  std::string subject;  // student id or class id
  std::string body;
  std::string prompt_hash;  // SHA-256 of the prompt text
  std::string client_id;
  std::string created_at;  // UTC, ISO 8601
  GenerationParams params;
};

/// Hex SHA-256 of the prompt.
std::string prompt_hash(const std::string& prompt);

/// Throws kInvalidArgument for an empty prompt and kClientError when the
/// backend returns only whitespace. The creation time honours
/// SOURCE_DATE_EPOCH when set.
Report generate_report(LlmClient& client, const std::string& prompt, Audience audience, const std::string& subject,
                       const GenerationParams& params = {});

bool verify_prompt_hash(const Report& report, const std::string& prompt);

nlohmann::json report_meta(const Report& report);

/// Writes `<stem>.md` and `<stem>.meta.json` into `dir`; returns the `.md` path.
std::filesystem::path save_report(const Report& report, const std::filesystem::path& dir, const std::string& stem);

}  // namespace kinesis::report

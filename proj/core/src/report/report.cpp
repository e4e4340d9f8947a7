// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/report/report.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include <fmt/format.h>

#include "kinesis/common/error.hpp"
#include "kinesis/common/hash.hpp"

namespace kinesis::report {
namespace {

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string prompt_hash(const std::string& prompt) { return sha256_hex(prompt); }

Report generate_report(LlmClient& client, const std::string& prompt, Audience audience, const std::string& subject,
                       const GenerationParams& params) {
  if (prompt.empty()) throw Error(ErrorCode::kInvalidArgument, "empty prompt", subject);
  Report r;
  r.audience = audience;
  r.subject = subject;
  r.body = client.complete(prompt, params);
  if (r.body.find_first_not_of(" \t\r\n") == std::string::npos)
    throw Error(ErrorCode::kClientError, fmt::format("{} returned an empty completion", client.id()), subject);
  r.prompt_hash = prompt_hash(prompt);
  r.client_id = client.id();
  r.created_at = utc_now();
  r.params = params;
  return r;
}

bool verify_prompt_hash(const Report& report, const std::string& prompt) {
  return report.prompt_hash == prompt_hash(prompt);
}

nlohmann::json report_meta(const Report& r) {
  return {{"schema", "kinesis.report/1"},
          {"audience", to_string(r.audience)},
          {"subject", r.subject},
          {"prompt_sha256", r.prompt_hash},
          {"client", r.client_id},
          {"created_at", r.created_at},
          {"params", r.params}};
}

std::filesystem::path save_report(const Report& report, const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto md = dir / (stem + ".md");
  const auto meta = dir / (stem + ".meta.json");
  {
    std::ofstream out(md, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write report", md.string());
    out << report.body;
  }
  std::ofstream out(meta);
  if (!out) throw Error(ErrorCode::kIo, "cannot write report metadata", meta.string());
  out << report_meta(report).dump(2) << '\n';
  return md;
}

}  // namespace kinesis::report

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

namespace kinesis::report {

struct GenerationParams {
  double temperature = 0.2;
  int max_tokens = 2048;
  std::string model = "gpt-4o";
  friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

void to_json(nlohmann::json& j, const GenerationParams& p);
void from_json(const nlohmann::json& j, GenerationParams& p);

/// Text completion backend. Implementations are safe to call concurrently.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  /// Throws kTransport when the backend is unreachable and kClientError for a
  /// rejected request or an unusable reply.
  virtual std::string complete(const std::string& prompt, const GenerationParams& params) = 0;
  virtual std::string id() const = 0;
};

/// Offline stand-in: the reply is a pure function of the prompt text. It
/// carries the report headings and restates figures found in the prompt.
class MockClient final : public LlmClient {
 public:
  std::string complete(const std::string& prompt, const GenerationParams& params) override;
  std::string id() const override { return "mock/1"; }
};

struct HttpConfig {
  std::string url;      // full chat-completion endpoint
  std::string api_key;  // sent as a bearer token when nonempty
  int max_retries = 3;
  double backoff_initial_s = 0.5;
  double backoff_cap_s = 8.0;
  double timeout_s = 120.0;
  int max_concurrent = 4;

  /// Reads KINESIS_LLM_URL (required) and KINESIS_LLM_KEY. Throws
  /// kInvalidArgument naming the missing variable.
  static HttpConfig from_env();
};

/// Chat-completion POST: `{model, messages:[{role:"user", content}],
/// temperature, max_tokens}`; the reply text is read from
/// `choices[0].message.content`. Connection failures, 429 and 5xx are retried
/// with exponential backoff; other 4xx fail at once.
class HttpClient final : public LlmClient {
 public:
  using Sleeper = std::function<void(double seconds)>;

  explicit HttpClient(HttpConfig cfg, Sleeper sleeper = {});
  ~HttpClient() override;

  std::string complete(const std::string& prompt, const GenerationParams& params) override;
  std::string id() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// "mock" or "http" (configured from the environment).
std::unique_ptr<LlmClient> make_client(const std::string& kind);

}  // namespace kinesis::report

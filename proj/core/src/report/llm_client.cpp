// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/report/llm_client.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "kinesis/common/error.hpp"
#include "kinesis/common/hash.hpp"
#include "kinesis/common/rng.hpp"
#include "kinesis/report/prompt.hpp"

namespace kinesis::report {

void to_json(nlohmann::json& j, const GenerationParams& p) {
  j = {{"temperature", p.temperature}, {"max_tokens", p.max_tokens}, {"model", p.model}};
}

void from_json(const nlohmann::json& j, GenerationParams& p) {
  p = GenerationParams{};
  p.temperature = j.value("temperature", p.temperature);
  p.max_tokens = j.value("max_tokens", p.max_tokens);
  p.model = j.value("model", p.model);
}

// ---------------------------------------------------------------------------
// Mock

namespace {

struct RowFact {
  std::string label;
  double duration = 0.0;
  double score = 0.0;
};

template <std::size_t N>
const std::string& pick(Rng& rng, const std::array<std::string, N>& options) {
  return options[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

}  // namespace

std::string MockClient::complete(const std::string& prompt, const GenerationParams&) {
  const auto digest = sha256_hex(prompt);
  Rng rng(std::stoull(digest.substr(0, 16), nullptr, 16));

  static const std::regex row(R"(^#\d+ \| ([0-9.]+)-([0-9.]+) s \| (.+?) \| score ([0-9.]+))");
  static const std::regex student(R"(^Student (\S+): active ([0-9.]+)%)");
  static const std::regex ranking(R"(^Participation ranking: (.*)$)");
  static const std::regex active(R"(^Active fraction: ([0-9.]+)%)");

  std::vector<RowFact> rows;
  std::vector<std::pair<std::string, double>> students;
  std::string ranking_line, active_pct;
  std::istringstream in(prompt);
  for (std::string line; std::getline(in, line);) {
    std::smatch m;
    if (std::regex_search(line, m, row))
      rows.push_back({m[3], std::stod(m[2]) - std::stod(m[1]), std::stod(m[4])});
    else if (std::regex_search(line, m, student))
      students.emplace_back(m[1], std::stod(m[2]));
    else if (std::regex_search(line, m, ranking))
      ranking_line = m[1];
    else if (active_pct.empty() && std::regex_search(line, m, active))
      active_pct = m[1];
  }

  std::map<std::string, std::pair<int, double>> per_label;  // count, score sum
  double total_time = 0.0, score_sum = 0.0;
  for (const auto& r : rows) {
    auto& e = per_label[r.label];
    ++e.first;
    e.second += r.score;
    total_time += r.duration;
    score_sum += r.score;
  }
  std::string best, worst;
  double best_mean = -1.0, worst_mean = 6.0;
  for (const auto& [label, e] : per_label) {
    const double mean = e.second / e.first;
    if (mean > best_mean) best_mean = mean, best = label;
    if (mean < worst_mean) worst_mean = mean, worst = label;
  }

  static const std::array<std::string, 3> openers = {"Overall,", "Across the session,", "Looking at the record,"};
  static const std::array<std::string, 3> mood = {
      "Engagement looked steady, with few long idle stretches.",
      "Effort rose and fell between activities, which suggests attention shifted with the task.",
      "The activity pattern points to reasonable confidence during practice."};
  static const std::array<std::string, 3> advice = {"Schedule short focused drills", "Add paired practice",
                                                    "Use demonstration and feedback rounds"};

  const auto& headings = report_headings();
  std::string out;
  out += fmt::format("# {}\n\n", headings[0]);
  if (!students.empty()) {
    out += fmt::format("{} {} students were analysed.", pick(rng, openers), students.size());
    if (!ranking_line.empty()) out += fmt::format(" Participation ranking: {}.", ranking_line);
  } else {
    out += fmt::format("{} {} actions were detected over {:.1f} s of movement.", pick(rng, openers), rows.size(),
                       total_time);
    if (!active_pct.empty()) out += fmt::format(" The student was active for {}% of the session.", active_pct);
  }
  out += fmt::format("\n\n# {}\n\n", headings[1]);
  if (!rows.empty())
    out += fmt::format("Mean quality score was {:.2f} out of 5. Strongest: {} ({:.2f}). Weakest: {} ({:.2f}).",
                       score_sum / static_cast<double>(rows.size()), best, best_mean, worst, worst_mean);
  else
    out += "No scored actions were available for this report.";
  out += fmt::format("\n\n# {}\n\n{}", headings[2], pick(rng, mood));
  out += fmt::format("\n\n# {}\n\n{}", headings[3], pick(rng, advice));
  out += worst.empty() ? "." : fmt::format(" targeting {}.", worst);
  out += fmt::format("\n\n_mock completion {}_\n", digest.substr(0, 12));
  return out;
}

// ---------------------------------------------------------------------------
// HTTP

HttpConfig HttpConfig::from_env() {
  HttpConfig c;
  const char* url = std::getenv("KINESIS_LLM_URL");
  if (!url || !*url) throw Error(ErrorCode::kInvalidArgument, "KINESIS_LLM_URL is not set", "KINESIS_LLM_URL");
  c.url = url;
  if (const char* key = std::getenv("KINESIS_LLM_KEY")) c.api_key = key;
  return c;
}

namespace {

// Splits "scheme://host[:port]/path" into origin and path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error(ErrorCode::kInvalidArgument, "malformed endpoint URL", url);
  return {m[1], m[2].matched ? std::string(m[2]) : std::string("/")};
}

class Gate {
 public:
  explicit Gate(int slots) : free_(std::max(1, slots)) {}
  void acquire() {
    std::unique_lock lock(m_);
    cv_.wait(lock, [&] { return free_ > 0; });
    --free_;
  }
  void release() {
    {
      std::lock_guard lock(m_);
      ++free_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex m_;
  std::condition_variable cv_;
  int free_;
};

}  // namespace

struct HttpClient::Impl {
  HttpConfig cfg;
  Sleeper sleep;
  std::string origin, path;
  Gate gate;

  Impl(HttpConfig c, Sleeper s) : cfg(std::move(c)), sleep(std::move(s)), gate(cfg.max_concurrent) {
    std::tie(origin, path) = split_url(cfg.url);
    if (!sleep)
      sleep = [](double sec) { std::this_thread::sleep_for(std::chrono::duration<double>(sec)); };
  }

  std::string attempt_loop(const std::string& body) {
    httplib::Client client(origin);
    const auto timeout = std::chrono::duration<double>(cfg.timeout_s);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    httplib::Headers headers;
    if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

    double backoff = cfg.backoff_initial_s;
    std::string last;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      if (attempt > 0) {
        spdlog::warn("LLM request failed ({}), retry {} of {} in {:.2f} s", last, attempt, cfg.max_retries, backoff);
        sleep(backoff);
        backoff = std::min(backoff * 2.0, cfg.backoff_cap_s);
      }
      auto res = client.Post(path, headers, body, "application/json");
      if (!res) {
        last = httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last = fmt::format("HTTP {}", res->status);
        continue;
      }
      if (res->status < 200 || res->status >= 300)
        throw Error(ErrorCode::kClientError, fmt::format("endpoint rejected the request with HTTP {}", res->status),
                    std::to_string(res->status));
      return res->body;
    }
    throw Error(ErrorCode::kTransport, fmt::format("no reply after {} attempts: {}", cfg.max_retries + 1, last),
                origin);
  }
};

HttpClient::HttpClient(HttpConfig cfg, Sleeper sleeper)
    : impl_(std::make_unique<Impl>(std::move(cfg), std::move(sleeper))) {}

HttpClient::~HttpClient() = default;

std::string HttpClient::id() const { return "http/" + impl_->origin + impl_->path; }

std::string HttpClient::complete(const std::string& prompt, const GenerationParams& params) {
  const nlohmann::json request = {{"model", params.model},
                                  {"messages", {{{"role", "user"}, {"content", prompt}}}},
                                  {"temperature", params.temperature},
                                  {"max_tokens", params.max_tokens}};
  impl_->gate.acquire();
  std::string raw;
  try {
    raw = impl_->attempt_loop(request.dump());
  } catch (...) {
    impl_->gate.release();
    throw;
  }
  impl_->gate.release();

  try {
    const auto reply = nlohmann::json::parse(raw);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kClientError, fmt::format("unusable completion reply: {}", e.what()), "choices");
  }
}

std::unique_ptr<LlmClient> make_client(const std::string& kind) {
  if (kind == "mock") return std::make_unique<MockClient>();
  if (kind == "http") return std::make_unique<HttpClient>(HttpConfig::from_env());
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown LLM backend '{}'", kind), "llm");
}

}  // namespace kinesis::report

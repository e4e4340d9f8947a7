// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/signal/csv.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "kinesis/common/error.hpp"
#include "kinesis/signal/ops.hpp"

namespace kinesis::signal {

namespace {

std::string trim_cr(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
  return line;
}

Error parse_error(std::size_t line_no, const std::string& what) {
  return Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + what,
               std::to_string(line_no));
}

double parse_field(std::string_view field, std::size_t line_no) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw parse_error(line_no, "not a number: '" + std::string(field) + "'");
  }
  return value;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".meta.json");
  return p;
}

SignalSequence load_signal(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open signal file " + path.string(), path.string());

  std::string line;
  if (!std::getline(in, line)) throw parse_error(1, "missing header");
  line = trim_cr(line);
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
  if (line != kSignalCsvHeader) {
    throw parse_error(1, std::string("expected header '") + kSignalCsvHeader + "'");
  }

  std::vector<double> t;
  std::vector<std::array<double, kChannels>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim_cr(line);
    if (line.empty()) continue;
    std::array<double, kChannels + 1> fields{};
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto end = comma == std::string::npos ? line.size() : comma;
      if (count >= fields.size()) throw parse_error(line_no, "too many fields");
      fields[count++] = parse_field(std::string_view(line).substr(start, end - start), line_no);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (count != fields.size()) throw parse_error(line_no, "expected 7 fields");
    if (!t.empty() && !(fields[0] > t.back())) {
      throw Error(ErrorCode::kNonMonotone,
                  "line " + std::to_string(line_no) + ": timestamp not strictly increasing at sample " +
                      std::to_string(t.size()),
                  std::to_string(t.size()));
    }
    t.push_back(fields[0]);
    std::array<double, kChannels> row{};
    std::copy(fields.begin() + 1, fields.end(), row.begin());
    rows.push_back(row);
  }

  Frames values(static_cast<Eigen::Index>(rows.size()), kChannels);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < kChannels; ++c) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
  }

  SignalMetadata meta;
  if (const auto side = sidecar_path(path); std::filesystem::exists(side)) {
    std::ifstream ms(side);
    try {
      const auto j = nlohmann::json::parse(ms);
      if (j.contains("rate")) meta.rate_hz = j.at("rate").get<double>();
      if (j.contains("subject_id")) meta.subject_id = j.at("subject_id").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, side.string() + ": " + e.what(), side.string());
    }
  }

  double rate = kCanonicalRateHz;
  if (meta.rate_hz) {
    rate = *meta.rate_hz;
  } else if (t.size() >= 2) {
    std::vector<double> dt(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i) dt[i - 1] = t[i] - t[i - 1];
    std::nth_element(dt.begin(), dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2), dt.end());
    rate = 1.0 / dt[dt.size() / 2];
  }
  return SignalSequence(rate, std::move(t), std::move(values), meta.subject_id);
}

SignalSequence ingest_signal(const std::filesystem::path& path) {
  auto seq = load_signal(path);
  if (seq.size() < 2) return SignalSequence(kCanonicalRateHz, seq.timestamps(), seq.frames(), seq.subject_id());
  return resample(seq, kCanonicalRateHz);
}

void save_signal(const std::filesystem::path& path, const SignalSequence& seq) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string(), path.string());
  out << kSignalCsvHeader << '\n';
  const auto& f = seq.frames();
  std::string row;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    row = format_double(seq.timestamps()[i]);
    for (std::size_t c = 0; c < kChannels; ++c) {
      row += ',';
      row += format_double(f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
    }
    out << row << '\n';
  }
  nlohmann::json meta{{"rate", seq.rate()}};
  if (seq.subject_id()) meta["subject_id"] = *seq.subject_id();
  std::ofstream(sidecar_path(path)) << meta.dump(2) << '\n';
}

}  // namespace kinesis::signal

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/report/template.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "kinesis/common/error.hpp"

namespace kinesis::report {
namespace {

constexpr std::string_view kMarker = "## Section:";
constexpr std::string_view kMeta = "#!";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_slot_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

struct Piece {
  bool slot;
  std::string text;
};

// Splits a body into literal text and placeholders.
std::vector<Piece> tokenize(std::string_view body, const std::string& section) {
  std::vector<Piece> out;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto open = body.find("{{", pos);
    if (open == std::string_view::npos) {
      out.push_back({false, std::string(body.substr(pos))});
      break;
    }
    if (open > pos) out.push_back({false, std::string(body.substr(pos, open - pos))});
    const auto close = body.find("}}", open + 2);
    if (close == std::string_view::npos)
      throw Error(ErrorCode::kTemplate, fmt::format("unterminated placeholder in section {}", section), section);
    const auto name = body.substr(open + 2, close - open - 2);
    if (!valid_slot_name(name))
      throw Error(ErrorCode::kTemplate, fmt::format("malformed placeholder '{{{{{}}}}}'", name), section);
    out.push_back({true, std::string(name)});
    pos = close + 2;
  }
  return out;
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string_view text) {
  PromptTemplate t;
  std::istringstream in{std::string(text)};
  std::string line;
  TemplateSection* current = nullptr;
  std::size_t next_order = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(kMarker, 0) == 0) {
      const auto name = trim(std::string_view(line).substr(kMarker.size()));
      const auto it = std::find(kSectionOrder.begin(), kSectionOrder.end(), name);
      if (it == kSectionOrder.end())
        throw Error(ErrorCode::kTemplate, fmt::format("unknown section '{}'", name), name);
      const auto order = static_cast<std::size_t>(it - kSectionOrder.begin());
      if (order < next_order)
        throw Error(ErrorCode::kTemplate, fmt::format("section '{}' repeated or out of order", name), name);
      next_order = order + 1;
      t.sections_.push_back({name, {}, {}});
      current = &t.sections_.back();
      continue;
    }
    if (!current) {
      if (line.rfind(kMeta, 0) == 0) {
        const auto kv = std::string_view(line).substr(kMeta.size());
        const auto colon = kv.find(':');
        if (colon != std::string_view::npos) {
          const auto key = trim(kv.substr(0, colon));
          if (key == "id") t.id_ = trim(kv.substr(colon + 1));
          else if (key == "version") t.version_ = trim(kv.substr(colon + 1));
        }
        continue;
      }
      if (trim(line).empty()) continue;
      throw Error(ErrorCode::kTemplate, fmt::format("text before the first section marker on line {}", line_no),
                  std::to_string(line_no));
    }
    current->body += line;
    current->body += '\n';
  }

  std::map<std::string, std::string> owner;
  for (auto& s : t.sections_) {
    // Trailing blank lines belong to the separator, not the section.
    while (s.body.size() >= 2 && s.body[s.body.size() - 1] == '\n' && s.body[s.body.size() - 2] == '\n')
      s.body.pop_back();
    for (const auto& p : tokenize(s.body, s.name)) {
      if (!p.slot) continue;
      const auto [it, fresh] = owner.emplace(p.text, s.name);
      if (!fresh && it->second != s.name)
        throw Error(ErrorCode::kTemplate,
                    fmt::format("slot '{}' used in sections {} and {}", p.text, it->second, s.name), p.text);
      if (std::find(s.slots.begin(), s.slots.end(), p.text) == s.slots.end()) s.slots.push_back(p.text);
    }
  }
  return t;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open template", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::vector<std::string> PromptTemplate::slots() const {
  std::set<std::string> all;
  for (const auto& s : sections_) all.insert(s.slots.begin(), s.slots.end());
  return {all.begin(), all.end()};
}

bool PromptTemplate::has_slot(const std::string& name) const {
  return std::any_of(sections_.begin(), sections_.end(), [&](const TemplateSection& s) {
    return std::find(s.slots.begin(), s.slots.end(), name) != s.slots.end();
  });
}

std::string render_prompt(const PromptTemplate& tmpl, const SlotMap& slots) {
  for (const auto& name : tmpl.slots())
    if (!slots.count(name)) throw Error(ErrorCode::kMissingSlot, fmt::format("missing slot '{}'", name), name);
  for (const auto& [name, value] : slots)
    if (!tmpl.has_slot(name)) throw Error(ErrorCode::kUnknownSlot, fmt::format("unknown slot '{}'", name), name);

  std::string out;
  for (const auto& s : tmpl.sections()) {
    if (!out.empty()) out += '\n';
    out += "## ";
    out += s.name;
    out += '\n';
    std::istringstream lines(s.body);
    std::string raw;
    while (std::getline(lines, raw)) {
      const auto pieces = tokenize(raw, s.name);
      const bool lone = pieces.size() == 1 ? pieces[0].slot
                                           : std::count_if(pieces.begin(), pieces.end(), [](const Piece& p) {
                                               return p.slot || !trim(p.text).empty();
                                             }) == 1 &&
                                                 std::any_of(pieces.begin(), pieces.end(),
                                                             [](const Piece& p) { return p.slot; });
      std::string line;
      for (const auto& p : pieces) line += p.slot ? slots.at(p.text) : p.text;
      // A line that held only a placeholder rendered empty is dropped.
      if (lone && trim(line).empty()) continue;
      out += line;
      out += '\n';
    }
  }
  return out;
}

}  // namespace kinesis::report

// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace kinesis::report {

/// Section names in the order they must appear.
inline constexpr std::array<std::string_view, 6> kSectionOrder = {"Context",  "Objective", "Style",
                                                                  "Tone",     "Audience",  "Response"};

struct TemplateSection {
  std::string name;
  std::string body;
  std::vector<std::string> slots;  // first-occurrence order, no repeats
};

/// A prompt template: `## Section: <Name>` markers followed by text that may
/// contain `{{slot}}` placeholders. Optional `#! id: ...` and `#! version: ...`
/// lines before the first marker name the template.
class PromptTemplate {
 public:
  /// Throws kTemplate for unknown, repeated or out-of-order sections, text
  /// before the first marker, unterminated or malformed placeholders, and a
  /// slot used in more than one section.
  static PromptTemplate parse(std::string_view text);
  static PromptTemplate load(const std::filesystem::path& path);

  const std::string& id() const { return id_; }
  const std::string& version() const { return version_; }
  const std::vector<TemplateSection>& sections() const { return sections_; }
  /// All declared slots, sorted.
  std::vector<std::string> slots() const;
  bool has_slot(const std::string& name) const;

 private:
  std::string id_ = "unnamed";
  std::string version_ = "0";
  std::vector<TemplateSection> sections_;
};

using SlotMap = std::map<std::string, std::string>;

/// Each section becomes `## <Name>` followed by its substituted body. Values
/// are inserted verbatim and never re-expanded. A line holding nothing but a
/// placeholder whose value is empty is dropped. Throws kMissingSlot or
/// kUnknownSlot naming the slot.
std::string render_prompt(const PromptTemplate& tmpl, const SlotMap& slots);

}  // namespace kinesis::report

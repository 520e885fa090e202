// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "keyweave/model.hpp"
#include "keyweave/providers.hpp"

namespace keyweave::prompt {

inline constexpr std::string_view kKeywordsMarker = "KEYWORDS:";
inline constexpr std::string_view kFrameStateMarker = "FRAME_STATE:";
inline constexpr std::string_view kOptimizationMarker = "OPTIMIZATION:";

/// Instruction text with {user_text} and {hint} slots. The text must spell
/// out all three section markers so the model knows the reply grammar.
class EnhancerTemplate {
 public:
  /// Throws ConfigError when a section marker is missing from the text.
  explicit EnhancerTemplate(std::string instruction_text);

  static EnhancerTemplate default_template();
  static EnhancerTemplate from_file(const std::filesystem::path& path);

  const std::string& instruction_text() const noexcept { return instruction_text_; }

 private:
  std::string instruction_text_;
};

/// Single-pass `{name}` substitution. Values are inserted verbatim and never
/// rescanned. Throws InvalidArgument for a slot with no value.
std::string substitute_slots(std::string_view text, const std::map<std::string, std::string, std::less<>>& values);

std::string build_instruction(std::string_view user_text, std::string_view hint,
                              const EnhancerTemplate& tmpl);

/// Parses a labelled-section reply. Sections may come in any order, each
/// marker starting a line. Keywords are comma separated, trimmed and
/// deduplicated case-insensitively keeping the first spelling.
/// Throws ParseError naming a missing section or on an empty keyword list.
PromptBundle parse_bundle(std::string_view response);

/// Canonical reply text; parse_bundle(render_bundle(b)) == b for bundles whose
/// fields are already trimmed and comma/newline free.
std::string render_bundle(const PromptBundle& bundle);

/// Asks the provider up to `attempts` times; the first parseable reply wins.
/// Throws EnhancementError carrying every raw reply when all are malformed.
PromptBundle enhance_with_retry(providers::Enhancer& enhancer, std::string_view user_text,
                                std::string_view hint, const EnhancerTemplate& tmpl, int attempts);

}  // namespace keyweave::prompt

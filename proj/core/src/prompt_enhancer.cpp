// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/prompt_enhancer.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <set>

#include "keyweave/error.hpp"
#include "keyweave/png_io.hpp"
#include "text_util.hpp"

namespace keyweave::prompt {
namespace {

constexpr std::string_view kDefaultInstruction =
    "You are preparing prompts for an image-to-video generation pipeline.\n"
    "The user supplied an image and the request below.\n"
    "\n"
    "Request: {user_text}\n"
    "Image notes: {hint}\n"
    "\n"
    "Reply with exactly three labelled sections, each starting on its own line:\n"
    "KEYWORDS: comma separated names of the key objects to keep in frame\n"
    "FRAME_STATE: one sentence describing what the final frame should show\n"
    "OPTIMIZATION: one sentence steering motion and background of the video\n";

}  // namespace

EnhancerTemplate::EnhancerTemplate(std::string instruction_text)
    : instruction_text_(std::move(instruction_text)) {
  for (auto marker : {kKeywordsMarker, kFrameStateMarker, kOptimizationMarker}) {
    if (instruction_text_.find(marker) == std::string::npos) {
      throw ConfigError("enhancer template does not mention section marker " + std::string(marker));
    }
  }
}

EnhancerTemplate EnhancerTemplate::default_template() {
  return EnhancerTemplate(std::string(kDefaultInstruction));
}

EnhancerTemplate EnhancerTemplate::from_file(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return EnhancerTemplate(std::string(bytes.begin(), bytes.end()));
}

std::string substitute_slots(std::string_view text,
                             const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const auto close = text.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto name = text.substr(i + 1, close - i - 1);
        const bool is_slot = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
        });
        if (is_slot) {
          const auto it = values.find(name);
          if (it == values.end()) {
            throw InvalidArgument("template slot {" + std::string(name) + "} has no value");
          }
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(text[i++]);
  }
  return out;
}

std::string build_instruction(std::string_view user_text, std::string_view hint,
                              const EnhancerTemplate& tmpl) {
  if (text::trim(user_text).empty()) throw InvalidArgument("user text is empty");
  return substitute_slots(tmpl.instruction_text(),
                          {{"user_text", std::string(user_text)}, {"hint", std::string(hint)}});
}

PromptBundle parse_bundle(std::string_view response) {
  constexpr std::array<std::string_view, 3> markers = {kKeywordsMarker, kFrameStateMarker,
                                                       kOptimizationMarker};
  std::array<std::optional<std::string>, 3> sections;
  int current = -1;

  std::size_t pos = 0;
  while (pos <= response.size()) {
    auto end = response.find('\n', pos);
    if (end == std::string_view::npos) end = response.size();
    std::string_view line = response.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto body = text::trim(line);

    int found = -1;
    for (int m = 0; m < 3; ++m) {
      if (body.starts_with(markers[m])) {
        found = m;
        break;
      }
    }
    if (found >= 0) {
      if (sections[found]) {
        throw ParseError("section " + std::string(markers[found]) + " appears more than once");
      }
      sections[found] = std::string(text::trim(body.substr(markers[found].size())));
      current = found;
    } else if (current >= 0 && !body.empty()) {
      auto& s = *sections[current];
      if (!s.empty()) s.push_back(current == 0 ? ',' : ' ');
      s += body;
    }
    if (end == response.size()) break;
    pos = end + 1;
  }

  for (int m = 0; m < 3; ++m) {
    if (!sections[m]) throw ParseError("response is missing section " + std::string(markers[m]));
  }

  std::vector<std::string> keywords;
  std::set<std::string> seen;
  std::string_view rest = *sections[0];
  while (true) {
    const auto comma = rest.find(',');
    const auto item = text::trim(rest.substr(0, comma));
    if (!item.empty() && seen.insert(text::lower(item)).second) keywords.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (keywords.empty()) throw ParseError("section KEYWORDS: holds no keywords");
  if (sections[1]->empty()) throw ParseError("section FRAME_STATE: is empty");
  if (sections[2]->empty()) throw ParseError("section OPTIMIZATION: is empty");
  return PromptBundle(std::move(keywords), std::move(*sections[1]), std::move(*sections[2]));
}

std::string render_bundle(const PromptBundle& bundle) {
  std::string out(kKeywordsMarker);
  out.push_back(' ');
  for (std::size_t i = 0; i < bundle.keywords().size(); ++i) {
    if (i > 0) out += ", ";
    out += bundle.keywords()[i];
  }
  out += '\n';
  out += kFrameStateMarker;
  out += ' ' + bundle.frame_state() + '\n';
  out += kOptimizationMarker;
  out += ' ' + bundle.optimization_prompt() + '\n';
  return out;
}

PromptBundle enhance_with_retry(providers::Enhancer& enhancer, std::string_view user_text,
                                std::string_view hint, const EnhancerTemplate& tmpl, int attempts) {
  if (attempts < 1) throw InvalidArgument("attempts must be at least 1");
  const providers::EnhanceQuery query{build_instruction(user_text, hint, tmpl), std::string(user_text),
                                      std::string(hint)};
  std::vector<std::string> raw;
  std::string last_error;
  for (int i = 0; i < attempts; ++i) {
    raw.push_back(enhancer.complete(query));
    try {
      return parse_bundle(raw.back()).with_user_text(std::string(user_text));
    } catch (const ParseError& e) {
      last_error = e.what();
    } catch (const InvalidArgument& e) {
      last_error = e.what();
    }
  }
  throw EnhancementError("enhancer produced no parseable reply in " + std::to_string(attempts) +
                             " attempt(s); last error: " + last_error,
                         std::move(raw));
}

}  // namespace keyweave::prompt

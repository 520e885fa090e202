// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/preferences.hpp"

#include <cmath>
#include <cstdio>

#include "csv.hpp"
#include "keyweave/error.hpp"
#include "text_util.hpp"

namespace keyweave::eval {

std::string_view to_string(PreferenceDimension d) noexcept {
  switch (d) {
    case PreferenceDimension::kVisualQuality: return "visual_quality";
    case PreferenceDimension::kMotionQuality: return "motion_quality";
    case PreferenceDimension::kTextVideoAlignment: return "text_video_alignment";
  }
  return "unknown";
}

std::string_view to_string(PreferenceChoice c) noexcept {
  switch (c) {
    case PreferenceChoice::kOurs: return "ours";
    case PreferenceChoice::kBaseline: return "baseline";
    case PreferenceChoice::kTie: return "tie";
  }
  return "unknown";
}

PreferenceDimension dimension_from_string(std::string_view name) {
  for (auto d : kPreferenceDimensions) {
    if (to_string(d) == name) return d;
  }
  throw ParseError("unknown preference dimension '" + std::string(name) + "'");
}

PreferenceChoice choice_from_string(std::string_view name) {
  for (auto c : {PreferenceChoice::kOurs, PreferenceChoice::kBaseline, PreferenceChoice::kTie}) {
    if (to_string(c) == name) return c;
  }
  throw ParseError("unknown preference choice '" + std::string(name) + "'");
}

PreferenceSummary aggregate_preferences(std::span<const PreferenceVote> votes) {
  PreferenceSummary s;
  for (const auto& v : votes) {
    auto& t = s.tallies[static_cast<std::size_t>(v.dimension)];
    switch (v.choice) {
      case PreferenceChoice::kOurs: ++t.ours; break;
      case PreferenceChoice::kBaseline: ++t.baseline; break;
      case PreferenceChoice::kTie: ++t.ties; break;
    }
  }
  for (auto& t : s.tallies) {
    const auto decisive = t.ours + t.baseline;
    if (decisive > 0) t.fraction = static_cast<double>(t.ours) / static_cast<double>(decisive);
  }
  return s;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
  return buf;
}

std::vector<PreferenceVote> parse_votes_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw ParseError("votes csv is empty");
  std::vector<std::string> header;
  for (const auto& h : rows[0]) header.emplace_back(text::trim(h));
  if (header != std::vector<std::string>{"item_id", "dimension", "choice"}) {
    throw ParseError("votes csv header must be item_id,dimension,choice");
  }
  std::vector<PreferenceVote> votes;
  votes.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) throw ParseError("votes csv row " + std::to_string(i + 1) + " needs 3 fields");
    votes.push_back({std::string(text::trim(r[0])), dimension_from_string(text::trim(r[1])),
                     choice_from_string(text::trim(r[2]))});
  }
  return votes;
}

std::string format_summary(const PreferenceSummary& summary) {
  std::string out = "dimension,ours,baseline,ties,preference\n";
  for (auto d : kPreferenceDimensions) {
    const auto& t = summary[d];
    out += std::string(to_string(d)) + ',' + std::to_string(t.ours) + ',' + std::to_string(t.baseline) + ',' +
           std::to_string(t.ties) + ',' + (t.fraction ? format_percent(*t.fraction) : "n/a") + '\n';
  }
  return out;
}

}  // namespace keyweave::eval

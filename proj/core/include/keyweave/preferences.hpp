// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace keyweave::eval {

enum class PreferenceDimension { kVisualQuality, kMotionQuality, kTextVideoAlignment };
enum class PreferenceChoice { kOurs, kBaseline, kTie };

inline constexpr std::array<PreferenceDimension, 3> kPreferenceDimensions = {
    PreferenceDimension::kVisualQuality, PreferenceDimension::kMotionQuality,
    PreferenceDimension::kTextVideoAlignment};

std::string_view to_string(PreferenceDimension d) noexcept;
std::string_view to_string(PreferenceChoice c) noexcept;
/// Both throw ParseError on unknown names.
PreferenceDimension dimension_from_string(std::string_view name);
PreferenceChoice choice_from_string(std::string_view name);

struct PreferenceVote {
  std::string item_id;
  PreferenceDimension dimension = PreferenceDimension::kVisualQuality;
  PreferenceChoice choice = PreferenceChoice::kTie;
};

struct DimensionTally {
  std::size_t ours = 0;
  std::size_t baseline = 0;
  std::size_t ties = 0;
  /// ours / (ours + baseline); empty when no decisive vote exists.
  std::optional<double> fraction;
};

struct PreferenceSummary {
  std::array<DimensionTally, 3> tallies;

  const DimensionTally& operator[](PreferenceDimension d) const { return tallies[static_cast<std::size_t>(d)]; }
};

/// Ties stay out of the denominator.
PreferenceSummary aggregate_preferences(std::span<const PreferenceVote> votes);

/// One-decimal percentage, e.g. 0.62 -> "62.0%".
std::string format_percent(double fraction);

/// CSV with header item_id,dimension,choice.
std::vector<PreferenceVote> parse_votes_csv(std::string_view text);

/// Dimension,Ours,Baseline,Ties,Preference table; absent fractions print "n/a".
std::string format_summary(const PreferenceSummary& summary);

}  // namespace keyweave::eval

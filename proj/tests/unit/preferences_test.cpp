// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "keyweave/error.hpp"
#include "keyweave/preferences.hpp"

namespace {

namespace eval = keyweave::eval;
using eval::PreferenceChoice;
using eval::PreferenceDimension;
using eval::PreferenceVote;

std::vector<PreferenceVote> votes(PreferenceDimension d, int ours, int baseline, int ties) {
  std::vector<PreferenceVote> out;
  int id = 0;
  for (int i = 0; i < ours; ++i) out.push_back({"v" + std::to_string(id++), d, PreferenceChoice::kOurs});
  for (int i = 0; i < baseline; ++i) out.push_back({"v" + std::to_string(id++), d, PreferenceChoice::kBaseline});
  for (int i = 0; i < ties; ++i) out.push_back({"v" + std::to_string(id++), d, PreferenceChoice::kTie});
  return out;
}

TEST(Preferences, SixtyTwoPercent) {
  const auto v = votes(PreferenceDimension::kTextVideoAlignment, 310, 190, 0);
  const auto s = eval::aggregate_preferences(v);
  const auto& t = s[PreferenceDimension::kTextVideoAlignment];
  ASSERT_TRUE(t.fraction.has_value());
  EXPECT_DOUBLE_EQ(*t.fraction, 0.62);
  EXPECT_EQ(eval::format_percent(*t.fraction), "62.0%");
  EXPECT_FALSE(s[PreferenceDimension::kVisualQuality].fraction.has_value());
}

TEST(Preferences, TiesLeaveTheDenominator) {
  const auto s = eval::aggregate_preferences(votes(PreferenceDimension::kMotionQuality, 3, 1, 50));
  EXPECT_DOUBLE_EQ(*s[PreferenceDimension::kMotionQuality].fraction, 0.75);
  EXPECT_EQ(s[PreferenceDimension::kMotionQuality].ties, 50u);
}

TEST(Preferences, AllOursAndOnlyTies) {
  EXPECT_DOUBLE_EQ(*eval::aggregate_preferences(votes(PreferenceDimension::kVisualQuality, 7, 0, 2))
                        [PreferenceDimension::kVisualQuality]
                            .fraction,
                   1.0);
  EXPECT_FALSE(eval::aggregate_preferences(votes(PreferenceDimension::kVisualQuality, 0, 0, 9))
                   [PreferenceDimension::kVisualQuality]
                       .fraction.has_value());
}

TEST(Preferences, PermutationInvariant) {
  auto v = votes(PreferenceDimension::kVisualQuality, 40, 20, 5);
  const auto more = votes(PreferenceDimension::kMotionQuality, 11, 30, 2);
  v.insert(v.end(), more.begin(), more.end());
  const auto base = eval::aggregate_preferences(v);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    std::shuffle(v.begin(), v.end(), rng);
    const auto s = eval::aggregate_preferences(v);
    for (auto d : eval::kPreferenceDimensions) {
      EXPECT_EQ(s[d].ours, base[d].ours);
      EXPECT_EQ(s[d].baseline, base[d].baseline);
      EXPECT_EQ(s[d].ties, base[d].ties);
      EXPECT_EQ(s[d].fraction, base[d].fraction);
    }
  }
}

TEST(Preferences, PercentFormatting) {
  EXPECT_EQ(eval::format_percent(0.513), "51.3%");
  EXPECT_EQ(eval::format_percent(0.668), "66.8%");
  EXPECT_EQ(eval::format_percent(1.0), "100.0%");
  EXPECT_EQ(eval::format_percent(0.0), "0.0%");
}

TEST(Preferences, NamesRoundTrip) {
  for (auto d : eval::kPreferenceDimensions) EXPECT_EQ(eval::dimension_from_string(eval::to_string(d)), d);
  for (auto c : {PreferenceChoice::kOurs, PreferenceChoice::kBaseline, PreferenceChoice::kTie}) {
    EXPECT_EQ(eval::choice_from_string(eval::to_string(c)), c);
  }
  EXPECT_THROW(eval::dimension_from_string("smell"), keyweave::ParseError);
  EXPECT_THROW(eval::choice_from_string("maybe"), keyweave::ParseError);
}

TEST(Preferences, CsvParsing) {
  const std::string csv = std::string("item_id,dimension,choice\n") + "a," +
                          std::string(eval::to_string(PreferenceDimension::kVisualQuality)) + "," +
                          std::string(eval::to_string(PreferenceChoice::kOurs)) + "\n" + "b," +
                          std::string(eval::to_string(PreferenceDimension::kMotionQuality)) + "," +
                          std::string(eval::to_string(PreferenceChoice::kTie)) + "\n";
  const auto v = eval::parse_votes_csv(csv);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].item_id, "a");
  EXPECT_EQ(v[1].choice, PreferenceChoice::kTie);
  EXPECT_THROW(eval::parse_votes_csv("id,dim\n"), keyweave::ParseError);
  EXPECT_THROW(eval::parse_votes_csv("item_id,dimension,choice\na,nope,ours\n"), keyweave::ParseError);
  EXPECT_THROW(eval::parse_votes_csv("item_id,dimension,choice\na,b\n"), keyweave::ParseError);
}

TEST(Preferences, SummaryTable) {
  const auto s = eval::aggregate_preferences(votes(PreferenceDimension::kTextVideoAlignment, 310, 190, 4));
  const std::string table = eval::format_summary(s);
  EXPECT_NE(table.find("62.0%"), std::string::npos);
  EXPECT_NE(table.find("n/a"), std::string::npos);
}

}  // namespace

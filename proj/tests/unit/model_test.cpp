// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstring>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "keyweave/error.hpp"
#include "keyweave/hashing.hpp"
#include "keyweave/model.hpp"

namespace {

using namespace keyweave;

GenerationRequest fixture_request() {
  return {kwtest::ramp(8, 8), "A red fox jumps over the fence", 16, 7, 0.5, 4};
}

// Independent re-statement of the canonical request encoding.
std::string oracle_digest(const GenerationRequest& r) {
  std::vector<std::uint8_t> b;
  auto u64 = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  };
  auto raw = [&](const void* p, std::size_t n) {
    u64(n);
    const auto* c = static_cast<const std::uint8_t*>(p);
    b.insert(b.end(), c, c + n);
  };
  const std::string tag = "keyweave.request.v1";
  raw(tag.data(), tag.size());
  u64(static_cast<std::uint64_t>(r.input_image.width()));
  u64(static_cast<std::uint64_t>(r.input_image.height()));
  raw(r.input_image.data().data(), r.input_image.data().size());
  raw(r.user_text.data(), r.user_text.size());
  u64(static_cast<std::uint64_t>(r.frame_count));
  u64(r.seed);
  std::uint64_t lambda_bits;
  std::memcpy(&lambda_bits, &r.lambda_mask, 8);
  u64(lambda_bits);
  u64(static_cast<std::uint64_t>(r.candidate_count));
  return sha256_hex(b);
}

TEST(ContentDigest, Deterministic) {
  EXPECT_EQ(content_digest(fixture_request()), content_digest(fixture_request()));
}

TEST(ContentDigest, EveryFieldMatters) {
  const auto base = content_digest(fixture_request());
  auto changed = [&](auto mutate) {
    auto r = fixture_request();
    mutate(r);
    return content_digest(r);
  };
  EXPECT_NE(base, changed([](auto& r) { r.seed += 1; }));
  EXPECT_NE(base, changed([](auto& r) { r.frame_count += 1; }));
  EXPECT_NE(base, changed([](auto& r) { r.candidate_count += 1; }));
  EXPECT_NE(base, changed([](auto& r) { r.lambda_mask = 0.25; }));
  EXPECT_NE(base, changed([](auto& r) { r.user_text += "!"; }));
  EXPECT_NE(base, changed([](auto& r) { r.input_image = kwtest::ramp(8, 8, 1); }));
  EXPECT_NE(base, changed([](auto& r) { r.input_image = kwtest::ramp(4, 16); }));
}

TEST(ContentDigest, MatchesOracleAndGolden) {
  const auto r = fixture_request();
  const auto d = content_digest(r);
  EXPECT_EQ(d, oracle_digest(r));
  EXPECT_EQ(d.size(), 64u);
  kwtest::expect_golden("request_digest.txt", d + "\n");
}

TEST(GenerationRequest, Validation) {
  auto r = fixture_request();
  EXPECT_NO_THROW(r.validate());
  r.frame_count = 1;
  EXPECT_THROW(r.validate(), InvalidArgument);
  r = fixture_request();
  r.candidate_count = 0;
  EXPECT_THROW(r.validate(), InvalidArgument);
  r = fixture_request();
  r.lambda_mask = -0.1;
  EXPECT_THROW(r.validate(), InvalidArgument);
  r.lambda_mask = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(r.validate(), InvalidArgument);
  r = fixture_request();
  r.user_text = "   ";
  EXPECT_THROW(r.validate(), InvalidArgument);
}

TEST(FrameSequence, Invariants) {
  EXPECT_THROW(FrameSequence({}), InvalidArgument);
  EXPECT_THROW(FrameSequence({kwtest::ramp(4, 4), kwtest::ramp(4, 5)}), DimensionMismatch);
  EXPECT_THROW(FrameSequence({kwtest::ramp(4, 4)}, FrameRate{0, 1}), InvalidArgument);
  const FrameSequence v({kwtest::ramp(4, 4), kwtest::ramp(4, 4, 9)}, FrameRate{24000, 1001});
  EXPECT_EQ(v.size(), 2u);
  EXPECT_EQ(v.width(), 4);
  EXPECT_NEAR(v.rate().value(), 23.976, 1e-3);
}

TEST(PromptBundle, Invariants) {
  EXPECT_THROW(PromptBundle({}, "s", "o"), InvalidArgument);
  EXPECT_THROW(PromptBundle({"cat", "  "}, "s", "o"), InvalidArgument);
  EXPECT_THROW(PromptBundle({"cat"}, " ", "o"), InvalidArgument);
  EXPECT_THROW(PromptBundle({"cat"}, "s", ""), InvalidArgument);
  const PromptBundle b({"cat"}, "s", "o");
  EXPECT_EQ(b.with_user_text("hi").raw_user_text(), "hi");
}

TEST(Mask, BitsAreNormalizedAndUnited) {
  const Mask a(2, 2, {0, 5, 0, 0});
  const Mask b(2, 2, {1, 0, 0, 0});
  EXPECT_EQ(a.bits()[1], 1);
  EXPECT_EQ(a.united(b).count(), 2u);
  EXPECT_THROW(Mask(2, 2, {0, 1}), InvalidArgument);
}

TEST(MaskSet, Invariants) {
  EXPECT_THROW(MaskSet(2, 2, {{"cat", 0.5, Mask::empty(3, 2)}}), DimensionMismatch);
  EXPECT_THROW(MaskSet(2, 2, {{"cat", 1.5, Mask::empty(2, 2)}}), InvalidArgument);
  const MaskSet set(2, 2, {{"a", 0.9, Mask(2, 2, {1, 0, 0, 0})}, {"b", 0.1, Mask(2, 2, {0, 0, 0, 1})}});
  EXPECT_EQ(set.union_mask(), Mask(2, 2, {1, 0, 0, 1}));
  EXPECT_EQ(MaskSet(2, 2).union_mask().count(), 0u);
}

}  // namespace

// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "keyweave/error.hpp"
#include "keyweave/providers.hpp"

namespace {

using namespace keyweave;
using namespace keyweave::providers;
using namespace std::chrono_literals;

TEST(Roles, NamesRoundTrip) {
  for (Role r : kAllRoles) EXPECT_EQ(role_from_string(to_string(r)), r);
  EXPECT_THROW(role_from_string("painter"), ConfigError);
}

TEST(RetryPolicy, ExponentialBackoffIsCapped) {
  const RetryPolicy p{5, 200ms, 1000ms};
  EXPECT_EQ(p.delay(0), 200ms);
  EXPECT_EQ(p.delay(1), 400ms);
  EXPECT_EQ(p.delay(2), 800ms);
  EXPECT_EQ(p.delay(3), 1000ms);
  EXPECT_EQ(p.delay(30), 1000ms);
}

TEST(ProviderEndpoint, Validation) {
  ProviderEndpoint ep{Role::kDetector, "http://localhost:1", 1000ms, 2, 10ms};
  EXPECT_NO_THROW(ep.validate());
  ep.base_url.clear();
  EXPECT_THROW(ep.validate(), ConfigError);
  ep.base_url = "x";
  ep.max_retries = -1;
  EXPECT_THROW(ep.validate(), ConfigError);
}

struct FailThenSucceed {
  int failures;
  ProviderError error;
  int calls = 0;
  int operator()() {
    if (calls++ < failures) throw error;
    return 42;
  }
};

TEST(WithRetry, RetriesTransientFailuresWithBackoff) {
  std::vector<std::chrono::milliseconds> slept;
  const Sleeper record = [&](std::chrono::milliseconds d) { slept.push_back(d); };
  FailThenSucceed call{2, ProviderError(ProviderErrorKind::kStatus, "busy", "", 503)};
  int attempts = 0;
  EXPECT_EQ(with_retry(RetryPolicy{2, 50ms}, std::ref(call), record, &attempts), 42);
  EXPECT_EQ(attempts, 3);
  EXPECT_EQ(slept, (std::vector<std::chrono::milliseconds>{50ms, 100ms}));
}

TEST(WithRetry, ExhaustionIsTypedAndCountsAttempts) {
  const Sleeper none = [](std::chrono::milliseconds) {};
  FailThenSucceed call{3, ProviderError(ProviderErrorKind::kTimeout, "slow")};
  try {
    with_retry(RetryPolicy{2, 1ms}, std::ref(call), none);
    FAIL() << "expected ProviderError";
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.kind(), ProviderErrorKind::kTimeout);
    EXPECT_EQ(e.attempts(), 3);
  }
  EXPECT_EQ(call.calls, 3);
}

TEST(WithRetry, PermanentFailuresAreNotRetried) {
  const Sleeper none = [](std::chrono::milliseconds) {};
  for (auto err : {ProviderError(ProviderErrorKind::kStatus, "bad", "{}", 400),
                   ProviderError(ProviderErrorKind::kDecode, "garbled")}) {
    FailThenSucceed call{1, err};
    EXPECT_THROW(with_retry(RetryPolicy{5, 1ms}, std::ref(call), none), ProviderError);
    EXPECT_EQ(call.calls, 1);
  }
  EXPECT_TRUE(ProviderError(ProviderErrorKind::kStatus, "", "", 429).retryable());
  EXPECT_TRUE(ProviderError(ProviderErrorKind::kTransport, "").retryable());
  EXPECT_FALSE(ProviderError(ProviderErrorKind::kUnavailable, "").retryable());
}

TEST(Embedding, NormalizeAndCosine) {
  const auto a = Embedding::normalize({3.0, 4.0});
  EXPECT_DOUBLE_EQ(a.values[0], 0.6);
  EXPECT_DOUBLE_EQ(a.values[1], 0.8);
  const auto b = Embedding::normalize({4.0, -3.0});
  EXPECT_NEAR(cosine(a, b), 0.0, 1e-15);
  EXPECT_NEAR(cosine(a, a), 1.0, 1e-15);
  EXPECT_THROW(Embedding::normalize({}), InvalidArgument);
  EXPECT_THROW(Embedding::normalize({0.0, 0.0}), InvalidArgument);
  EXPECT_THROW(Embedding::normalize({NAN, 1.0}), InvalidArgument);
  EXPECT_THROW(cosine(a, Embedding::normalize({1.0, 2.0, 3.0})), ConfigError);
}

TEST(Embedding, CosineIgnoresPositiveRescaling) {
  keyweave::SplitMix64 rng{5};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> u(16), v(16);
    for (auto& x : u) x = rng.uniform(-1000, 1000) / 100.0;
    for (auto& x : v) x = rng.uniform(-1000, 1000) / 100.0;
    const double k = 1 + rng.uniform(1, 1000) / 7.0;
    std::vector<double> ku = u;
    for (auto& x : ku) x *= k;
    EXPECT_NEAR(cosine(Embedding::normalize(u), Embedding::normalize(v)),
                cosine(Embedding::normalize(ku), Embedding::normalize(v)), 1e-12);
    EXPECT_NEAR(cosine(Embedding::normalize(u), Embedding::normalize(v)), kwtest::oracle_cosine(u, v), 1e-12);
  }
}

// Providers that break their contracts on purpose.

class WrongSizeDetector final : public Detector {
 public:
  std::string identity() const override { return "wrong-size"; }

 protected:
  MaskSet do_detect(const ImageBuffer&, std::span<const std::string>) override { return MaskSet(1, 1); }
};

class WrongSizeKeyframe final : public KeyframeGenerator {
 public:
  std::string identity() const override { return "wrong-size"; }

 protected:
  ImageBuffer do_generate(const ImageBuffer&, const MaskSet&, std::string_view, std::uint64_t) override {
    return ImageBuffer::filled(1, 1, 0, 0, 0);
  }
};

class SplitSpaceEmbedder final : public Embedder {
 public:
  std::string identity() const override { return "split-space"; }

 protected:
  std::vector<double> do_embed_image(const ImageBuffer&) override { return {1, 2, 3}; }
  std::vector<double> do_embed_text(std::string_view) override { return {1, 2, 3, 4}; }
};

class FixedScorer final : public QualityScorer {
 public:
  explicit FixedScorer(double v) : v_(v) {}
  std::string identity() const override { return "fixed"; }

 protected:
  double do_score(const ImageBuffer&) override { return v_; }

 private:
  double v_;
};

TEST(Contracts, DetectorMasksMustMatchImage) {
  WrongSizeDetector d;
  const std::vector<std::string> labels{"cat"};
  EXPECT_THROW(d.detect(kwtest::ramp(4, 4), labels), ContractViolation);
  EXPECT_THROW(d.detect(kwtest::ramp(4, 4), {}), InvalidArgument);
}

TEST(Contracts, KeyframeMustKeepSizeAndNeedsPrompt) {
  WrongSizeKeyframe k;
  const auto img = kwtest::ramp(4, 4);
  EXPECT_THROW(k.generate_keyframe(img, MaskSet(4, 4), "go", 0), ContractViolation);
  EXPECT_THROW(k.generate_keyframe(img, MaskSet(4, 4), "  ", 0), InvalidArgument);
  EXPECT_THROW(k.generate_keyframe(img, MaskSet(3, 4), "go", 0), DimensionMismatch);
}

TEST(Contracts, EmbedderMustUseOneSpace) {
  SplitSpaceEmbedder e;
  const auto img = e.embed_image(kwtest::ramp(2, 2));
  EXPECT_TRUE(img.normalized);
  EXPECT_NEAR(std::sqrt(kwtest::dot(img.values, img.values)), 1.0, 1e-15);
  EXPECT_THROW(e.embed_text("hello"), ConfigError);
}

TEST(Contracts, ScorerRange) {
  EXPECT_DOUBLE_EQ(FixedScorer(0.25).score_quality(kwtest::ramp(2, 2)), 0.25);
  EXPECT_THROW(FixedScorer(1.5).score_quality(kwtest::ramp(2, 2)), ContractViolation);
  EXPECT_THROW(FixedScorer(NAN).score_quality(kwtest::ramp(2, 2)), ContractViolation);
}

TEST(ProviderSet, RequiresEveryRoleButScorer) {
  ProviderSet set;
  EXPECT_THROW(set.validate(), ConfigError);
}

}  // namespace

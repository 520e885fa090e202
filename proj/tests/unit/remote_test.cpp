// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

// Remote adapters against the in-process provider server: results must match
// the wrapped mocks, and failures must surface as typed ProviderErrors.

#include <atomic>
#include <mutex>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "fixtures.hpp"
#include "keyweave/error.hpp"
#include "keyweave/mock_providers.hpp"
#include "keyweave/provider_server.hpp"
#include "keyweave/remote_providers.hpp"

namespace {

using namespace std::chrono_literals;
using keyweave::ProviderError;
using keyweave::ProviderErrorKind;
namespace kp = keyweave::providers;

kp::ProviderEndpoint endpoint(kp::Role role, const std::string& url, int max_retries = 2) {
  kp::ProviderEndpoint ep;
  ep.role = role;
  ep.base_url = url;
  ep.max_retries = max_retries;
  ep.backoff_base = 5ms;
  ep.timeout = 5000ms;
  return ep;
}

struct SleepLog {
  std::mutex mu;
  std::vector<std::chrono::milliseconds> delays;
  kp::Sleeper sleeper() {
    return [this](std::chrono::milliseconds d) {
      std::lock_guard lock(mu);
      delays.push_back(d);
    };
  }
};

// Fails the first `k` requests on one route, then lets them through.
struct FailFirst {
  std::string route;
  int k = 0;
  int status = 503;
  std::shared_ptr<std::atomic<int>> seen = std::make_shared<std::atomic<int>>(0);
  kp::FaultInjector injector() const {
    return [r = route, k = k, s = status, seen = seen](std::string_view path) -> std::optional<kp::ServerFault> {
      if (path != r) return std::nullopt;
      if (seen->fetch_add(1) < k) return kp::ServerFault{s, "injected_fault", "try again"};
      return std::nullopt;
    };
  }
};

TEST(RemoteContract, AdaptersMatchMocks) {
  auto mocks = kp::make_mock_providers();
  kp::ProviderServer server(mocks);
  server.start();
  const std::string url = server.base_url();

  const auto img = kwtest::scene(48, std::vector<std::string>{"cat", "ball"});
  const std::vector<std::string> labels{"cat", "ball", "lawn"};

  auto enhancer = kp::make_remote_enhancer(endpoint(kp::Role::kEnhancer, url));
  EXPECT_EQ(kp::enhance(*enhancer, "A cat chases the ball across the lawn", ""),
            kp::enhance(*mocks.enhancer, "A cat chases the ball across the lawn", ""));

  auto detector = kp::make_remote_detector(endpoint(kp::Role::kDetector, url));
  const auto masks = mocks.detector->detect(img, labels);
  EXPECT_EQ(detector->detect(img, labels), masks);

  auto keyframe = kp::make_remote_keyframe(endpoint(kp::Role::kKeyframe, url));
  EXPECT_EQ(keyframe->generate_keyframe(img, masks, "the cat sleeps", 9),
            mocks.keyframe->generate_keyframe(img, masks, "the cat sleeps", 9));

  auto interp = kp::make_remote_interpolator(endpoint(kp::Role::kInterpolator, url));
  const auto end = kwtest::noise_image(48, 48, 4);
  const auto remote_seq = interp->interpolate(img, end, "p", 5, 1);
  const auto local_seq = mocks.interpolator->interpolate(img, end, "p", 5, 1);
  ASSERT_EQ(remote_seq.size(), local_seq.size());
  for (std::size_t t = 0; t < local_seq.size(); ++t) EXPECT_EQ(remote_seq[t], local_seq[t]);

  auto embedder = kp::make_remote_embedder(endpoint(kp::Role::kEmbedder, url));
  const auto re = embedder->embed_image(img);
  const auto le = mocks.embedder->embed_image(img);
  ASSERT_EQ(re.dimension(), le.dimension());
  for (std::size_t i = 0; i < le.dimension(); ++i) EXPECT_NEAR(re.values[i], le.values[i], 1e-12);
  EXPECT_NEAR(kp::cosine(embedder->embed_text("red fox"), mocks.embedder->embed_text("red fox")), 1.0, 1e-12);

  auto scorer = kp::make_remote_scorer(endpoint(kp::Role::kScorer, url));
  EXPECT_DOUBLE_EQ(scorer->score_quality(img), mocks.scorer->score_quality(img));
  server.stop();
}

TEST(RemoteContract, FailThenSucceedWithinBudget) {
  for (int k = 0; k <= 3; ++k) {
    FailFirst faults{"/v1/embed_text", k};
    kp::ProviderServer server(kp::make_mock_providers(), faults.injector());
    server.start();
    SleepLog log;
    kp::RemoteOptions opts;
    opts.sleeper = log.sleeper();
    opts.retry_counter = std::make_shared<std::atomic<long>>(0);
    auto embedder = kp::make_remote_embedder(endpoint(kp::Role::kEmbedder, server.base_url(), 2), opts);
    if (k <= 2) {
      EXPECT_NO_THROW(embedder->embed_text("hello")) << "k=" << k;
      EXPECT_EQ(log.delays.size(), std::size_t(k));
      EXPECT_EQ(opts.retry_counter->load(), k);
    } else {
      try {
        embedder->embed_text("hello");
        ADD_FAILURE() << "expected ProviderError for k=" << k;
      } catch (const ProviderError& e) {
        EXPECT_EQ(e.kind(), ProviderErrorKind::kStatus);
        EXPECT_EQ(e.status(), 503);
        EXPECT_EQ(e.attempts(), 3);
        EXPECT_NE(e.payload().find("injected_fault"), std::string::npos);
      }
      EXPECT_EQ(log.delays, (std::vector<std::chrono::milliseconds>{5ms, 10ms}));
    }
    EXPECT_EQ(faults.seen->load(), std::min(k, 3) + (k <= 2 ? 1 : 0));
    server.stop();
  }
}

TEST(RemoteContract, ClientErrorsAreNotRetried) {
  FailFirst faults{"/v1/score", 100, 400};
  kp::ProviderServer server(kp::make_mock_providers(), faults.injector());
  server.start();
  SleepLog log;
  kp::RemoteOptions opts;
  opts.sleeper = log.sleeper();
  auto scorer = kp::make_remote_scorer(endpoint(kp::Role::kScorer, server.base_url(), 5), opts);
  try {
    scorer->score_quality(kwtest::ramp(8, 8));
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.status(), 400);
    EXPECT_FALSE(e.retryable());
    EXPECT_EQ(e.attempts(), 1);
  }
  EXPECT_TRUE(log.delays.empty());
  server.stop();
}

TEST(RemoteContract, DisabledRouteAnswers404) {
  auto set = kp::make_mock_providers();
  set.scorer = nullptr;
  kp::ProviderServer server(set);
  server.start();
  auto scorer = kp::make_remote_scorer(endpoint(kp::Role::kScorer, server.base_url()));
  try {
    scorer->score_quality(kwtest::ramp(8, 8));
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.status(), 404);
    EXPECT_NE(e.payload().find("route_disabled"), std::string::npos);
  }
  server.stop();
}

TEST(RemoteContract, TransportFailureIsRetriedThenTyped) {
  int port = 0;
  {
    kp::ProviderServer probe(kp::make_mock_providers());
    port = probe.start();
    probe.stop();
  }
  SleepLog log;
  kp::RemoteOptions opts;
  opts.sleeper = log.sleeper();
  auto embedder =
      kp::make_remote_embedder(endpoint(kp::Role::kEmbedder, "http://127.0.0.1:" + std::to_string(port), 1), opts);
  try {
    embedder->embed_text("x");
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_TRUE(e.kind() == ProviderErrorKind::kTransport || e.kind() == ProviderErrorKind::kTimeout);
    EXPECT_EQ(e.attempts(), 2);
  }
  EXPECT_EQ(log.delays.size(), 1u);
}

TEST(RemoteContract, SendsBearerToken) {
  std::string seen;
  std::mutex mu;
  httplib::Server raw;
  raw.Post("/svc/v1/score", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    seen = req.get_header_value("Authorization");
    res.set_content(R"({"score": 0.25})", "application/json");
  });
  const int port = raw.bind_to_any_port("127.0.0.1");
  std::thread t([&] { raw.listen_after_bind(); });
  raw.wait_until_ready();
  kp::RemoteOptions opts;
  opts.bearer_token = "s3cret";
  auto scorer = kp::make_remote_scorer(
      endpoint(kp::Role::kScorer, "http://127.0.0.1:" + std::to_string(port) + "/svc/"), opts);
  EXPECT_DOUBLE_EQ(scorer->score_quality(kwtest::ramp(8, 8)), 0.25);
  raw.stop();
  t.join();
  EXPECT_EQ(seen, "Bearer s3cret");
}

TEST(RemoteContract, UndecodableBodies) {
  httplib::Server raw;
  raw.Post("/v1/embed_text", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json", "text/plain");
  });
  raw.Post("/v1/score", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"score": 3.5})", "application/json");
  });
  raw.Post("/v1/embed_image", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"vals": [1]})", "application/json");
  });
  const int port = raw.bind_to_any_port("127.0.0.1");
  std::thread t([&] { raw.listen_after_bind(); });
  raw.wait_until_ready();
  const std::string url = "http://127.0.0.1:" + std::to_string(port);
  auto embedder = kp::make_remote_embedder(endpoint(kp::Role::kEmbedder, url));
  try {
    embedder->embed_text("x");
    ADD_FAILURE();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.kind(), ProviderErrorKind::kDecode);
    EXPECT_EQ(e.payload(), "not json");
  }
  EXPECT_THROW(embedder->embed_image(kwtest::ramp(8, 8)), ProviderError);
  auto scorer = kp::make_remote_scorer(endpoint(kp::Role::kScorer, url));
  EXPECT_THROW(scorer->score_quality(kwtest::ramp(8, 8)), keyweave::ContractViolation);
  raw.stop();
  t.join();
}

}  // namespace

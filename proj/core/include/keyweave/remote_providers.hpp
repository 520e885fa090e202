// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "keyweave/providers.hpp"

namespace keyweave::providers {

/// Environment variable holding the bearer token sent to remote providers.
inline constexpr const char* kTokenEnvVar = "KEYWEAVE_API_TOKEN";

std::optional<std::string> token_from_env();

struct RemoteOptions {
  std::optional<std::string> bearer_token;
  /// Waits between retries; tests substitute a recorder.
  Sleeper sleeper = sleep_for;
  /// Incremented once per retry (not per first attempt) when set.
  std::shared_ptr<std::atomic<long>> retry_counter;
};

// HTTP+JSON adapters, one per role. Each call opens its own client, so an
// adapter holds no per-call state and can be shared across threads. Transport
// failures, timeouts, 429 and 5xx are retried with exponential backoff; other
// statuses and undecodable bodies fail immediately.

std::shared_ptr<Enhancer> make_remote_enhancer(const ProviderEndpoint& ep, const RemoteOptions& opts = {});
std::shared_ptr<Detector> make_remote_detector(const ProviderEndpoint& ep, const RemoteOptions& opts = {});
std::shared_ptr<KeyframeGenerator> make_remote_keyframe(const ProviderEndpoint& ep,
                                                        const RemoteOptions& opts = {});
std::shared_ptr<Interpolator> make_remote_interpolator(const ProviderEndpoint& ep,
                                                       const RemoteOptions& opts = {});
std::shared_ptr<Embedder> make_remote_embedder(const ProviderEndpoint& ep, const RemoteOptions& opts = {});
std::shared_ptr<QualityScorer> make_remote_scorer(const ProviderEndpoint& ep, const RemoteOptions& opts = {});

}  // namespace keyweave::providers

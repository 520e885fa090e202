// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "keyweave/error.hpp"
#include "keyweave/image.hpp"
#include "keyweave/model.hpp"

namespace keyweave::providers {

enum class Role { kEnhancer, kDetector, kKeyframe, kInterpolator, kEmbedder, kScorer };

inline constexpr Role kAllRoles[] = {Role::kEnhancer,     Role::kDetector, Role::kKeyframe,
                                     Role::kInterpolator, Role::kEmbedder, Role::kScorer};

std::string_view to_string(Role role) noexcept;
/// Throws ConfigError for unknown names.
Role role_from_string(std::string_view name);

struct RetryPolicy {
  int max_retries = 2;
  std::chrono::milliseconds backoff_base{200};
  std::chrono::milliseconds backoff_cap{10'000};

  /// Delay before retry number `retry` (0-based): base * 2^retry, capped.
  std::chrono::milliseconds delay(int retry) const noexcept;
};

struct ProviderEndpoint {
  Role role = Role::kEnhancer;
  std::string base_url;
  std::chrono::milliseconds timeout{30'000};
  int max_retries = 2;
  std::chrono::milliseconds backoff_base{200};

  void validate() const;
  RetryPolicy retry_policy() const { return {max_retries, backoff_base}; }
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline void sleep_for(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

/// Invokes `call` until it succeeds, it throws a non-retryable ProviderError,
/// or max_retries retries are spent. The final ProviderError records how many
/// attempts were made. Other exception types pass straight through.
template <class Call>
auto with_retry(const RetryPolicy& policy, Call&& call, const Sleeper& sleep = sleep_for,
                int* attempts_out = nullptr) -> decltype(call()) {
  for (int attempt = 0;; ++attempt) {
    try {
      if (attempts_out != nullptr) *attempts_out = attempt + 1;
      return call();
    } catch (ProviderError& e) {
      e.set_attempts(attempt + 1);
      if (!e.retryable() || attempt >= policy.max_retries) throw;
      sleep(policy.delay(attempt));
    }
  }
}

/// A point in a provider's shared image/text embedding space.
struct Embedding {
  std::vector<double> values;
  bool normalized = false;

  /// L2-normalized copy of `raw`. Throws InvalidArgument on an empty,
  /// non-finite or zero-norm vector.
  static Embedding normalize(std::vector<double> raw);

  std::size_t dimension() const noexcept { return values.size(); }
};

/// Cosine similarity; ConfigError when dimensions disagree.
double cosine(const Embedding& a, const Embedding& b);

// ---------------------------------------------------------------------------
// Role interfaces. Public entry points check the operation contract and then
// dispatch to the implementation hook, so mocks and remote adapters share the
// same pre/post conditions.

struct EnhanceQuery {
  std::string instruction;
  std::string user_text;
  std::string hint;
};

class Enhancer {
 public:
  virtual ~Enhancer() = default;
  virtual std::string identity() const = 0;

  /// Raw labelled-section reply for one enhancement attempt.
  std::string complete(const EnhanceQuery& query);

 protected:
  virtual std::string do_complete(const EnhanceQuery& query) = 0;
};

class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::string identity() const = 0;

  MaskSet detect(const ImageBuffer& image, std::span<const std::string> labels);

 protected:
  virtual MaskSet do_detect(const ImageBuffer& image, std::span<const std::string> labels) = 0;
};

class KeyframeGenerator {
 public:
  virtual ~KeyframeGenerator() = default;
  virtual std::string identity() const = 0;

  ImageBuffer generate_keyframe(const ImageBuffer& image, const MaskSet& masks, std::string_view prompt,
                                std::uint64_t seed);

 protected:
  virtual ImageBuffer do_generate(const ImageBuffer& image, const MaskSet& masks, std::string_view prompt,
                                  std::uint64_t seed) = 0;
};

class Interpolator {
 public:
  virtual ~Interpolator() = default;
  virtual std::string identity() const = 0;

  /// Checks preconditions only. Callers that need the anchoring guarantee
  /// validate the returned frames themselves.
  FrameSequence interpolate(const ImageBuffer& start, const ImageBuffer& end, std::string_view prompt,
                            int frame_count, std::uint64_t seed);

 protected:
  virtual FrameSequence do_interpolate(const ImageBuffer& start, const ImageBuffer& end,
                                       std::string_view prompt, int frame_count, std::uint64_t seed) = 0;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string identity() const = 0;

  Embedding embed_image(const ImageBuffer& image);
  Embedding embed_text(std::string_view text);

 protected:
  virtual std::vector<double> do_embed_image(const ImageBuffer& image) = 0;
  virtual std::vector<double> do_embed_text(std::string_view text) = 0;

 private:
  // First dimension seen from either modality; later outputs must agree.
  void check_dimension(std::size_t d, const char* modality);
  std::atomic<std::size_t> dimension_{0};
};

class QualityScorer {
 public:
  virtual ~QualityScorer() = default;
  virtual std::string identity() const = 0;

  /// Score in [0, 1]; ContractViolation if the provider leaves that range.
  double score_quality(const ImageBuffer& frame);

 protected:
  virtual double do_score(const ImageBuffer& frame) = 0;
};

/// One provider per role. The scorer is optional; every other role is required.
struct ProviderSet {
  std::shared_ptr<Enhancer> enhancer;
  std::shared_ptr<Detector> detector;
  std::shared_ptr<KeyframeGenerator> keyframe;
  std::shared_ptr<Interpolator> interpolator;
  std::shared_ptr<Embedder> embedder;
  std::shared_ptr<QualityScorer> scorer;

  /// Throws ConfigError naming the first missing required role.
  void validate() const;
  /// Role name -> provider identity, for provenance.
  std::map<std::string, std::string> identities() const;
};

/// Convenience enhancement with the default template: builds the instruction,
/// asks the provider, parses and validates the three sub-prompts.
PromptBundle enhance(Enhancer& enhancer, std::string_view user_text, std::string_view hint,
                     int attempts = 3);

}  // namespace keyweave::providers

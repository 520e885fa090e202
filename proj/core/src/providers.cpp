// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/providers.hpp"

#include <algorithm>
#include <numeric>

#include "keyweave/prompt_enhancer.hpp"
#include "text_util.hpp"

namespace keyweave {

const char* to_string(ProviderErrorKind kind) noexcept {
  switch (kind) {
    case ProviderErrorKind::kTimeout: return "timeout";
    case ProviderErrorKind::kTransport: return "transport";
    case ProviderErrorKind::kStatus: return "status";
    case ProviderErrorKind::kDecode: return "decode";
    case ProviderErrorKind::kUnavailable: return "unavailable";
  }
  return "unknown";
}

}  // namespace keyweave

namespace keyweave::providers {

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::kEnhancer: return "enhancer";
    case Role::kDetector: return "detector";
    case Role::kKeyframe: return "keyframe";
    case Role::kInterpolator: return "interpolator";
    case Role::kEmbedder: return "embedder";
    case Role::kScorer: return "scorer";
  }
  return "unknown";
}

Role role_from_string(std::string_view name) {
  for (Role r : kAllRoles) {
    if (to_string(r) == name) return r;
  }
  throw ConfigError("unknown provider role '" + std::string(name) + "'");
}

std::chrono::milliseconds RetryPolicy::delay(int retry) const noexcept {
  auto d = backoff_base;
  for (int i = 0; i < retry && d < backoff_cap; ++i) d *= 2;
  return std::min(d, backoff_cap);
}

void ProviderEndpoint::validate() const {
  const std::string who(to_string(role));
  if (base_url.empty()) throw ConfigError(who + ": base_url is empty");
  if (timeout.count() <= 0) throw ConfigError(who + ": timeout must be positive");
  if (max_retries < 0) throw ConfigError(who + ": max_retries must be non-negative");
  if (backoff_base.count() < 0) throw ConfigError(who + ": backoff_base must be non-negative");
}

Embedding Embedding::normalize(std::vector<double> raw) {
  if (raw.empty()) throw InvalidArgument("embedding has no components");
  double sq = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v)) throw InvalidArgument("embedding has a non-finite component");
    sq += v * v;
  }
  if (!(sq > 0.0)) throw InvalidArgument("embedding has zero norm");
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : raw) v *= inv;
  return Embedding{std::move(raw), true};
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.dimension() != b.dimension()) {
    throw ConfigError("embedding dimensions disagree: " + std::to_string(a.dimension()) + " vs " +
                      std::to_string(b.dimension()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw InvalidArgument("cosine of a zero vector");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

std::string Enhancer::complete(const EnhanceQuery& query) {
  if (text::trim(query.user_text).empty()) throw InvalidArgument("enhance: user text is empty");
  return do_complete(query);
}

MaskSet Detector::detect(const ImageBuffer& image, std::span<const std::string> labels) {
  if (labels.empty()) throw InvalidArgument("detect: label list is empty");
  MaskSet out = do_detect(image, labels);
  if (out.width() != image.width() || out.height() != image.height()) {
    throw ContractViolation("detector '" + identity() + "' returned masks of the wrong size");
  }
  return out;
}

ImageBuffer KeyframeGenerator::generate_keyframe(const ImageBuffer& image, const MaskSet& masks,
                                                 std::string_view prompt, std::uint64_t seed) {
  if (text::trim(prompt).empty()) throw InvalidArgument("generate_keyframe: prompt is empty");
  if (masks.width() != image.width() || masks.height() != image.height()) {
    throw DimensionMismatch("generate_keyframe: masks do not match the image size");
  }
  ImageBuffer out = do_generate(image, masks, prompt, seed);
  if (!out.same_shape(image)) {
    throw ContractViolation("keyframe provider '" + identity() + "' changed the image size");
  }
  return out;
}

FrameSequence Interpolator::interpolate(const ImageBuffer& start, const ImageBuffer& end,
                                        std::string_view prompt, int frame_count, std::uint64_t seed) {
  if (!start.same_shape(end)) throw DimensionMismatch("interpolate: start and end differ in size");
  if (frame_count < 2) throw InvalidArgument("interpolate: frame_count must be at least 2");
  return do_interpolate(start, end, prompt, frame_count, seed);
}

void Embedder::check_dimension(std::size_t d, const char* modality) {
  std::size_t expected = 0;
  if (dimension_.compare_exchange_strong(expected, d)) return;
  if (expected != d) {
    throw ConfigError("embedder '" + identity() + "' returned a " + std::to_string(d) + "-d " +
                      modality + " embedding but previously produced " + std::to_string(expected) +
                      "-d vectors; image and text must share one space");
  }
}

Embedding Embedder::embed_image(const ImageBuffer& image) {
  auto e = Embedding::normalize(do_embed_image(image));
  check_dimension(e.dimension(), "image");
  return e;
}

Embedding Embedder::embed_text(std::string_view text) {
  auto e = Embedding::normalize(do_embed_text(text));
  check_dimension(e.dimension(), "text");
  return e;
}

double QualityScorer::score_quality(const ImageBuffer& frame) {
  const double s = do_score(frame);
  if (!(s >= 0.0 && s <= 1.0)) {
    throw ContractViolation("quality scorer '" + identity() + "' returned a score outside [0, 1]");
  }
  return s;
}

void ProviderSet::validate() const {
  if (!enhancer) throw ConfigError("no provider configured for role enhancer");
  if (!detector) throw ConfigError("no provider configured for role detector");
  if (!keyframe) throw ConfigError("no provider configured for role keyframe");
  if (!interpolator) throw ConfigError("no provider configured for role interpolator");
  if (!embedder) throw ConfigError("no provider configured for role embedder");
}

std::map<std::string, std::string> ProviderSet::identities() const {
  std::map<std::string, std::string> out;
  if (enhancer) out["enhancer"] = enhancer->identity();
  if (detector) out["detector"] = detector->identity();
  if (keyframe) out["keyframe"] = keyframe->identity();
  if (interpolator) out["interpolator"] = interpolator->identity();
  if (embedder) out["embedder"] = embedder->identity();
  if (scorer) out["scorer"] = scorer->identity();
  return out;
}

PromptBundle enhance(Enhancer& enhancer, std::string_view user_text, std::string_view hint, int attempts) {
  return prompt::enhance_with_retry(enhancer, user_text, hint, prompt::EnhancerTemplate::default_template(),
                                    attempts);
}

}  // namespace keyweave::providers

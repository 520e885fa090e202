// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "keyweave/providers.hpp"

namespace keyweave::providers {

// Deterministic in-process stand-ins for every role. Each one is a pure
// function of its inputs (and seed); the exact semantics are fixed so that
// golden files stay portable.

/// Determiner-led noun extraction over lowercase word tokens.
///
/// After each determiner the run of following non-stop-words is taken and its
/// last token kept, stepping back one token when that last token looks like a
/// third-person verb (ends in 's' and the run is longer than one word). Falls
/// back to every non-stop-word, then to the first token.
std::vector<std::string> mock_keywords(std::string_view text);

class MockEnhancer final : public Enhancer {
 public:
  std::string identity() const override { return "mock-enhancer/1"; }

 protected:
  std::string do_complete(const EnhanceQuery& query) override;
};

/// Colour the mock detector associates with a label: the low three bytes of
/// FNV-1a-64 over the lowercased label, as (R, G, B).
std::array<std::uint8_t, 3> label_color(std::string_view label);

/// Per-label colour thresholding. A pixel belongs to a label when every
/// channel is within `tolerance` of the label colour; confidence is
/// 1 - mean(max channel deviation) / 255 over the matched pixels. Labels with
/// no matching pixel produce no entry, so there is at most one entry per label.
class MockDetector final : public Detector {
 public:
  explicit MockDetector(int tolerance = 24) : tolerance_(tolerance) {}
  std::string identity() const override { return "mock-detector/1"; }

 protected:
  MaskSet do_detect(const ImageBuffer& image, std::span<const std::string> labels) override;

 private:
  int tolerance_;
};

/// Seeded perturbation outside the mask union: per-channel shift in [-32, 32]
/// plus per-sample noise in [-8, 8], from SplitMix64(seed ^ fnv1a64(prompt)).
/// Pixels inside the union are copied unchanged.
class MockKeyframeGenerator final : public KeyframeGenerator {
 public:
  std::string identity() const override { return "mock-keyframe/1"; }

 protected:
  ImageBuffer do_generate(const ImageBuffer& image, const MaskSet& masks, std::string_view prompt,
                          std::uint64_t seed) override;
};

/// Linear crossfade, frame t = round_half_up(((T-1-t)*start + t*end) / (T-1)),
/// computed in exact integer arithmetic.
class MockInterpolator final : public Interpolator {
 public:
  explicit MockInterpolator(FrameRate rate = {}) : rate_(rate) {}
  std::string identity() const override { return "mock-crossfade/1"; }

 protected:
  FrameSequence do_interpolate(const ImageBuffer& start, const ImageBuffer& end, std::string_view prompt,
                               int frame_count, std::uint64_t seed) override;

 private:
  FrameRate rate_;
};

inline constexpr std::size_t kMockEmbeddingDim = 64;

/// Image: 8x8 block-mean of BT.601 luma, centred as (g - 127.5) / 127.5.
/// Text: bag of word tokens hashed into 64 buckets by fnv1a64 % 64.
/// An all-zero raw vector maps to the uniform vector before normalization.
class MockEmbedder final : public Embedder {
 public:
  std::string identity() const override { return "mock-embedder/1"; }

  /// Raw (unnormalized) vectors, exposed for oracles.
  static std::vector<double> raw_image_vector(const ImageBuffer& image);
  static std::vector<double> raw_text_vector(std::string_view text);

 protected:
  std::vector<double> do_embed_image(const ImageBuffer& image) override;
  std::vector<double> do_embed_text(std::string_view text) override;
};

/// Sharpness proxy: variance v of the 4-neighbour Laplacian of luma (edges
/// replicated), mapped to v / (v + 1000).
class MockQualityScorer final : public QualityScorer {
 public:
  static constexpr double kHalfScoreVariance = 1000.0;
  std::string identity() const override { return "mock-sharpness/1"; }

  static double laplacian_variance(const ImageBuffer& frame);

 protected:
  double do_score(const ImageBuffer& frame) override;
};

/// All six roles backed by the mocks above.
ProviderSet make_mock_providers(FrameRate rate = {});

}  // namespace keyweave::providers

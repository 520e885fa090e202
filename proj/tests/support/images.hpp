// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic test images. No test framework dependency, so the acceptance
// runner can use them too.

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "keyweave/hashing.hpp"
#include "keyweave/image.hpp"
#include "keyweave/mock_providers.hpp"

namespace kwtest {

using keyweave::ImageBuffer;

inline ImageBuffer noise_image(int w, int h, std::uint64_t seed) {
  keyweave::SplitMix64 rng{seed};
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
  for (auto& v : px) v = static_cast<std::uint8_t>(rng.next() & 0xFF);
  return ImageBuffer(w, h, std::move(px));
}

inline ImageBuffer solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  std::vector<std::uint8_t> px;
  px.reserve(static_cast<std::size_t>(w) * h * 3);
  for (int i = 0; i < w * h; ++i) px.insert(px.end(), {r, g, b});
  return ImageBuffer(w, h, std::move(px));
}

// Smooth diagonal ramp; cheap stand-in for a natural photograph.
inline ImageBuffer ramp(int w, int h, int phase = 0) {
  std::vector<std::uint8_t> px;
  px.reserve(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      px.push_back(static_cast<std::uint8_t>((x * 200 / std::max(1, w - 1) + phase) % 256));
      px.push_back(static_cast<std::uint8_t>((y * 160 / std::max(1, h - 1) + 40 + phase) % 256));
      px.push_back(static_cast<std::uint8_t>(((x + y) * 90 / std::max(1, w + h - 2) + 80) % 256));
    }
  }
  return ImageBuffer(w, h, std::move(px));
}

// Ramp background with one square per label, painted in the colour the mock
// detector looks for. Squares sit on a diagonal and never overlap.
inline ImageBuffer scene(int size, std::span<const std::string> labels) {
  ImageBuffer base = ramp(size, size);
  std::vector<std::uint8_t> px(base.data().begin(), base.data().end());
  const int n = static_cast<int>(labels.size());
  const int side = size / (2 * std::max(1, n) + 1);
  for (int i = 0; i < n; ++i) {
    const auto c = keyweave::providers::label_color(labels[i]);
    const int x0 = (2 * i + 1) * side;
    const int y0 = (2 * i + 1) * side;
    for (int y = y0; y < y0 + side; ++y) {
      for (int x = x0; x < x0 + side; ++x) {
        const std::size_t o = (static_cast<std::size_t>(y) * size + x) * 3;
        px[o] = c[0];
        px[o + 1] = c[1];
        px[o + 2] = c[2];
      }
    }
  }
  return ImageBuffer(size, size, std::move(px));
}

}  // namespace kwtest

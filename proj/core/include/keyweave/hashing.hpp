// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace keyweave {

std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// 64-bit FNV-1a. Used where a portable, fully specified hash is needed
/// (mock providers, text bucketing).
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// SplitMix64 step; the PRNG behind every seeded mock.
struct SplitMix64 {
  std::uint64_t state;

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [lo, hi].
  constexpr int uniform(int lo, int hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(next() % span);
  }
};

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws ParseError on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace keyweave

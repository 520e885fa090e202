// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

// Shared fixtures and oracles for the test binaries.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <unistd.h>

#include "images.hpp"

namespace kwtest {

using keyweave::ImageBuffer;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Cosine straight from the definition, no pre-normalization.
inline double oracle_cosine(std::span<const double> a, std::span<const double> b) {
  return dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> serial{0};
    path_ = std::filesystem::temp_directory_path() /
            ("keyweave-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(serial++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

// Compares against tests/golden/<name>. KEYWEAVE_UPDATE_GOLDEN=1 rewrites the
// file instead; do that only after the value was checked against an oracle.
inline void expect_golden(const std::string& name, const std::string& actual) {
  const std::filesystem::path file = std::filesystem::path(KEYWEAVE_GOLDEN_DIR) / name;
  if (const char* update = std::getenv("KEYWEAVE_UPDATE_GOLDEN"); update != nullptr && *update == '1') {
    write_text(file, actual);
    return;
  }
  ASSERT_TRUE(std::filesystem::exists(file)) << "missing golden file " << file;
  EXPECT_EQ(read_text(file), actual) << "golden mismatch: " << name;
}

}  // namespace kwtest

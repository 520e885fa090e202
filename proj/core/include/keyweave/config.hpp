// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "keyweave/model.hpp"
#include "keyweave/providers.hpp"
#include "keyweave/remote_providers.hpp"

namespace keyweave::pipeline {

/// base_url value selecting the in-process mock for a role.
inline constexpr std::string_view kMockUrl = "mock";

struct PipelineConfig {
  /// One endpoint per configured role. A missing scorer means no quality
  /// scorer; every other role is required.
  std::map<providers::Role, providers::ProviderEndpoint> endpoints;

  double lambda_mask = 0.5;
  int candidate_count = 4;
  int frame_count = 16;
  FrameRate fps{8, 1};
  int working_resolution = 256;
  double confidence_floor = 0.3;
  int enhance_attempts = 3;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> template_path;

  std::filesystem::path artifact_root = "artifacts";
  bool cache_enabled = true;
  int parallelism = 2;

  /// Every role served by the mocks.
  static PipelineConfig defaults();

  /// Throws ConfigError on out-of-range values or an artifact root that
  /// cannot be created (the directory is created as a side effect).
  void validate() const;

  /// Canonical JSON of the settings that shape outputs (not the artifact root,
  /// cache flag or parallelism), embedded in artifact manifests.
  std::string snapshot_json() const;
};

/// Parses TOML. Relative paths resolve against `base_dir`.
PipelineConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Per-role retry counters shared with the remote adapters built from a config.
struct RetryCounters {
  std::map<providers::Role, std::shared_ptr<std::atomic<long>>> by_role;
  long total(std::initializer_list<providers::Role> roles) const;
};

struct BuiltProviders {
  providers::ProviderSet set;
  RetryCounters retries;
};

/// Instantiates mocks for "mock" endpoints and HTTP adapters for the rest.
BuiltProviders make_providers(const PipelineConfig& config, providers::RemoteOptions options = {});

}  // namespace keyweave::pipeline

// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "keyweave/config.hpp"
#include "keyweave/error.hpp"

namespace {

using keyweave::ConfigError;
using keyweave::pipeline::PipelineConfig;
using keyweave::providers::Role;
namespace kp = keyweave::pipeline;

TEST(Config, DefaultsUseMocksEverywhere) {
  kwtest::TempDir dir("cfg");
  auto c = PipelineConfig::defaults();
  c.artifact_root = dir / "artifacts";
  for (Role r : keyweave::providers::kAllRoles) EXPECT_EQ(c.endpoints.at(r).base_url, "mock");
  EXPECT_NO_THROW(c.validate());
  EXPECT_TRUE(std::filesystem::is_directory(c.artifact_root));
  EXPECT_EQ(c.lambda_mask, 0.5);
  EXPECT_EQ(c.candidate_count, 4);
  EXPECT_EQ(c.frame_count, 16);
}

TEST(Config, ParsesEveryKey) {
  const auto c = kp::parse_config(R"(
[pipeline]
lambda_mask = 1.25
candidate_count = 6
frame_count = 9
working_resolution = 64
confidence_floor = 0.4
enhance_attempts = 5
seed = 77
cache = false
parallelism = 3
artifact_root = "out"
fps = [24000, 1001]
template = "t.txt"

[retry]
max_retries = 4
backoff_base_ms = 10
timeout_ms = 900

[providers]
detector = "http://127.0.0.1:9000/api"
keyframe = { url = "http://127.0.0.1:9001", max_retries = 1, timeout_ms = 50 }
)",
                                  "/base");
  EXPECT_EQ(c.lambda_mask, 1.25);
  EXPECT_EQ(c.candidate_count, 6);
  EXPECT_EQ(c.frame_count, 9);
  EXPECT_EQ(c.working_resolution, 64);
  EXPECT_EQ(c.confidence_floor, 0.4);
  EXPECT_EQ(c.enhance_attempts, 5);
  EXPECT_EQ(c.seed, 77u);
  EXPECT_FALSE(c.cache_enabled);
  EXPECT_EQ(c.parallelism, 3);
  EXPECT_EQ(c.artifact_root, std::filesystem::path("/base/out"));
  EXPECT_EQ(c.fps, (keyweave::FrameRate{24000, 1001}));
  EXPECT_EQ(c.template_path, std::filesystem::path("/base/t.txt"));
  const auto& det = c.endpoints.at(Role::kDetector);
  EXPECT_EQ(det.base_url, "http://127.0.0.1:9000/api");
  EXPECT_EQ(det.max_retries, 4);
  EXPECT_EQ(det.timeout.count(), 900);
  EXPECT_EQ(det.backoff_base.count(), 10);
  const auto& kf = c.endpoints.at(Role::kKeyframe);
  EXPECT_EQ(kf.max_retries, 1);
  EXPECT_EQ(kf.timeout.count(), 50);
  EXPECT_EQ(kf.backoff_base.count(), 10);
  EXPECT_EQ(c.endpoints.at(Role::kEnhancer).base_url, "mock");
  EXPECT_EQ(c.endpoints.at(Role::kEnhancer).max_retries, 4);
}

TEST(Config, IntegerFps) {
  EXPECT_EQ(kp::parse_config("[pipeline]\nfps = 12\n").fps, (keyweave::FrameRate{12, 1}));
  EXPECT_THROW(kp::parse_config("[pipeline]\nfps = [1, 2, 3]\n"), ConfigError);
  EXPECT_THROW(kp::parse_config("[pipeline]\nfps = \"fast\"\n"), ConfigError);
}

TEST(Config, ScorerCanBeDisabled) {
  const auto c = kp::parse_config("[providers]\nscorer = \"none\"\n");
  EXPECT_FALSE(c.endpoints.contains(Role::kScorer));
  EXPECT_THROW(kp::parse_config("[providers]\ndetector = \"none\"\n"), ConfigError);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(kp::parse_config("[pipeline]\nframe_count = \"many\"\n"), ConfigError);
  EXPECT_THROW(kp::parse_config("[providers]\npainter = \"mock\"\n"), ConfigError);
  EXPECT_THROW(kp::parse_config("[providers]\ndetector = 5\n"), ConfigError);
  try {
    kp::parse_config("[pipeline]\nseed = 1\nlambda_mask = = 2\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, ValidateRanges) {
  kwtest::TempDir dir("cfg");
  auto fresh = [&] {
    auto c = PipelineConfig::defaults();
    c.artifact_root = dir.path();
    return c;
  };
  auto c = fresh();
  c.frame_count = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = fresh();
  c.candidate_count = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = fresh();
  c.lambda_mask = -0.1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = fresh();
  c.confidence_floor = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = fresh();
  c.endpoints.erase(Role::kEmbedder);
  EXPECT_THROW(c.validate(), ConfigError);
  c = fresh();
  c.endpoints.erase(Role::kScorer);
  EXPECT_NO_THROW(c.validate());
  c = fresh();
  c.endpoints[Role::kDetector].timeout = std::chrono::milliseconds(0);
  EXPECT_THROW(c.validate(), ConfigError);
  c = fresh();
  kwtest::write_text(dir / "file", "x");
  c.artifact_root = dir / "file";
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, SnapshotCoversOutputShapingSettingsOnly) {
  auto a = PipelineConfig::defaults();
  auto b = a;
  b.artifact_root = "/elsewhere";
  b.cache_enabled = false;
  b.parallelism = 8;
  EXPECT_EQ(a.snapshot_json(), b.snapshot_json());
  b.lambda_mask = 2.0;
  EXPECT_NE(a.snapshot_json(), b.snapshot_json());
  const auto j = nlohmann::json::parse(a.snapshot_json());
  EXPECT_EQ(j["providers"]["embedder"]["url"], "mock");
  EXPECT_TRUE(j["template"].is_null());
}

TEST(Config, LoadResolvesAgainstFileDirectory) {
  kwtest::TempDir dir("cfg");
  kwtest::write_text(dir / "conf/k.toml", "[pipeline]\nartifact_root = \"arts\"\n");
  const auto c = kp::load_config(dir / "conf/k.toml");
  EXPECT_EQ(c.artifact_root, dir / "conf/arts");
  EXPECT_THROW(kp::load_config(dir / "missing.toml"), keyweave::IoError);
}

TEST(Config, MakeProvidersMixesMocksAndRemotes) {
  auto c = PipelineConfig::defaults();
  c.endpoints[Role::kEmbedder].base_url = "http://127.0.0.1:1/x";
  const auto built = kp::make_providers(c);
  EXPECT_EQ(built.set.identities().at("embedder"), "remote:http://127.0.0.1:1/x");
  EXPECT_EQ(built.set.identities().at("detector"), built.set.detector->identity());
  EXPECT_TRUE(built.retries.by_role.contains(Role::kEmbedder));
  EXPECT_FALSE(built.retries.by_role.contains(Role::kDetector));
  EXPECT_EQ(built.retries.total({Role::kEmbedder, Role::kDetector}), 0);

  c.endpoints[Role::kEmbedder].base_url = "ftp://nope";
  EXPECT_THROW(kp::make_providers(c), ConfigError);
}

}  // namespace

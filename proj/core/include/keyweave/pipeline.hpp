// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "keyweave/artifact.hpp"
#include "keyweave/config.hpp"
#include "keyweave/model.hpp"
#include "keyweave/providers.hpp"
#include "keyweave/report.hpp"

namespace keyweave::prompt {
class EnhancerTemplate;
}

namespace keyweave::pipeline {

inline constexpr std::string_view kStageEnhance = "prompt_enhancer";
inline constexpr std::string_view kStageKeyframe = "keyframe_generator";
inline constexpr std::string_view kStageVideo = "video_generator";

/// One row of a dataset manifest. Paths are absolute after loading.
struct DatasetEntry {
  std::string id;
  std::filesystem::path image_path;
  std::string text;
  std::optional<std::filesystem::path> reference_video_dir;
};

/// JSON array of {id, image_path, text, reference_video_dir?}; relative paths
/// resolve against the manifest's directory. Ids must be unique.
std::vector<DatasetEntry> load_dataset_manifest(const std::filesystem::path& path);

/// Reads an artifact directory written by Pipeline::run.
GenerationArtifact load_artifact(const std::filesystem::path& dir);

/// enhance -> end keyframe -> video, with a digest-keyed artifact cache.
///
/// Stage failures surface as StageError naming the stage, with the original
/// exception nested. Safe to call run() from several threads at once.
class Pipeline {
 public:
  Pipeline(PipelineConfig config, providers::ProviderSet providers, RetryCounters retries = {});

  /// Builds the providers named by the config.
  static Pipeline from_config(PipelineConfig config, providers::RemoteOptions options = {});

  const PipelineConfig& config() const noexcept { return config_; }
  const providers::ProviderSet& providers() const noexcept { return providers_; }

  /// Request for `image` ingested to the working resolution, with the
  /// config's generation settings unless overridden.
  GenerationRequest make_request(const ImageBuffer& image, std::string text,
                                 std::optional<int> frame_count = {},
                                 std::optional<std::uint64_t> seed = {}) const;

  std::filesystem::path artifact_dir(const GenerationRequest& request) const;

  /// Runs every stage and persists the artifact, or loads the cached one.
  GenerationArtifact run(const GenerationRequest& request);

  /// Runs (or loads) every manifest entry with up to config.parallelism
  /// entries in flight, writes report.json and report.csv into `out_dir`
  /// and returns the report. Entries keep manifest order.
  eval::EvaluationReport evaluate(const std::filesystem::path& manifest, const std::filesystem::path& out_dir);

  /// Provider calls made through this pipeline so far.
  long provider_calls() const noexcept { return calls_->load(); }
  long cache_hits() const noexcept { return cache_hits_->load(); }

 private:
  GenerationArtifact generate(const GenerationRequest& request, const std::string& digest);

  PipelineConfig config_;
  providers::ProviderSet providers_;
  RetryCounters retries_;
  std::shared_ptr<const prompt::EnhancerTemplate> template_;
  std::shared_ptr<std::atomic<long>> calls_ = std::make_shared<std::atomic<long>>(0);
  std::shared_ptr<std::atomic<long>> cache_hits_ = std::make_shared<std::atomic<long>>(0);
};

}  // namespace keyweave::pipeline

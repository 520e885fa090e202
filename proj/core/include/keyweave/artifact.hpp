// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "keyweave/model.hpp"

namespace keyweave {

/// Which provider served a pipeline stage.
struct ProvenanceRecord {
  std::string stage;
  std::string role;
  std::string provider;

  friend bool operator==(const ProvenanceRecord&, const ProvenanceRecord&) = default;
};

/// Wall-clock facts about a stage. Kept apart from provenance because they
/// differ between otherwise identical runs.
struct StageTelemetry {
  std::string stage;
  std::string started_at;  ///< ISO-8601 UTC
  double duration_ms = 0.0;
  int provider_calls = 0;
  long retries = 0;

  friend bool operator==(const StageTelemetry&, const StageTelemetry&) = default;
};

struct GenerationArtifact {
  std::string request_digest;
  GenerationRequest request;
  PromptBundle prompt_bundle;
  MaskSet mask_set;  ///< key-object masks
  ImageBuffer end_frame;
  FrameSequence video;
  std::vector<ProvenanceRecord> provenance;
  std::vector<StageTelemetry> telemetry;

  /// Throws ContractViolation unless frame 0 equals the request image, the
  /// last frame equals end_frame and the length equals request.frame_count.
  void validate() const;
};

/// Equality of everything except telemetry.
bool same_content(const GenerationArtifact& a, const GenerationArtifact& b);

/// "frame_00042.png"
std::string frame_file_name(std::size_t index);

/// Writes frame_00000.png ... into `dir`.
void write_frames(const std::filesystem::path& dir, const FrameSequence& video);

/// Frames plus manifest.json recording fps, dimensions, frame count and provenance.
void write_video_dir(const std::filesystem::path& dir, const FrameSequence& video,
                     const std::vector<ProvenanceRecord>& provenance = {});

/// Reads a video directory. The frame rate and count come from manifest.json
/// when present; otherwise frames are read from index 0 until a gap and the
/// default rate applies.
FrameSequence read_video_dir(const std::filesystem::path& dir);

}  // namespace keyweave

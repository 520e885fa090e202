// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "keyweave/model.hpp"
#include "keyweave/providers.hpp"

namespace keyweave::keyframe {

/// Composite end-frame objective: detection loss + lambda * mask loss + video
/// (text alignment) loss. Each term is normalized into [0, 1].
struct CandidateScore {
  double l_detect = 0.0;
  double l_mask = 0.0;
  double l_video = 0.0;
  double lambda = 0.0;
  double total = 0.0;

  static CandidateScore combine(double l_detect, double l_mask, double l_video, double lambda);

  friend bool operator==(const CandidateScore&, const CandidateScore&) = default;
};

/// Key-object masks: entries whose label matches a keyword (case-insensitive)
/// with confidence >= floor, by descending confidence then label.
MaskSet select_key_masks(const MaskSet& masks, std::span<const std::string> keywords, double confidence_floor);

/// Scores one candidate end frame against the source image.
///
///  - l_detect: 1 - mean over key labels of the best re-detection confidence
///    in the candidate (an undetected label counts 0).
///  - l_mask: mean |candidate - source| / 255 over the key-mask union, all
///    three channels.
///  - l_video: (1 - cos(text, candidate)) / 2.
///
/// With no key masks l_detect is 1 and l_mask is 0, so selection falls to
/// l_video alone.
CandidateScore score_candidate(const ImageBuffer& candidate, const ImageBuffer& source, const MaskSet& key_masks,
                               std::string_view text_prompt, double lambda, providers::Embedder& embedder,
                               providers::Detector& detector);

/// Prompt handed to the keyframe provider and used for l_video.
std::string keyframe_prompt(const PromptBundle& bundle);

struct Candidate {
  std::uint64_t seed = 0;
  std::optional<ImageBuffer> image;
  std::optional<CandidateScore> score;
  std::string error;  ///< set when generation failed
};

struct EndFrameResult {
  ImageBuffer end_frame;
  CandidateScore score;
  MaskSet key_masks;
  MaskSet detections;
  std::vector<Candidate> candidates;  ///< in seed order
  std::size_t selected = 0;
};

struct Options {
  double confidence_floor = 0.3;
};

/// detect -> select key masks -> N candidates with seeds seed..seed+N-1
/// generated and scored concurrently -> argmin of total, ties to the lower seed.
/// The reduction runs after every candidate resolved, in seed order, so the
/// result does not depend on completion order. Candidates whose generation
/// fails are skipped; ProviderError(kUnavailable) when none survives.
/// Detection and scoring failures propagate.
EndFrameResult generate_end_frame(const GenerationRequest& request, const PromptBundle& bundle,
                                  const providers::ProviderSet& providers, const Options& options = {});

}  // namespace keyweave::keyframe

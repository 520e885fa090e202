// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/video_generator.hpp"

#include <string>

#include "keyweave/error.hpp"
#include "keyweave/metrics.hpp"

namespace keyweave::video {

FrameSequence synthesize(const ImageBuffer& start, const ImageBuffer& end, const PromptBundle& bundle,
                         int frame_count, std::uint64_t seed, providers::Interpolator& interpolator) {
  FrameSequence seq = interpolator.interpolate(start, end, bundle.optimization_prompt(), frame_count, seed);
  const std::string who = "interpolator '" + interpolator.identity() + "'";
  if (seq.size() != static_cast<std::size_t>(frame_count)) {
    throw ContractViolation(who + " returned " + std::to_string(seq.size()) + " frames, expected " +
                            std::to_string(frame_count));
  }
  if (!seq.front().same_shape(start)) {
    throw ContractViolation(who + " returned frames of size " + std::to_string(seq.width()) + "x" +
                            std::to_string(seq.height()) + ", expected " + std::to_string(start.width()) +
                            "x" + std::to_string(start.height()));
  }
  if (seq.front() != start) {
    throw ContractViolation(who + " broke start anchoring: frame 0 differs from the start image");
  }
  if (seq.back() != end) {
    throw ContractViolation(who + " broke end anchoring: frame " + std::to_string(frame_count - 1) +
                            " differs from the end keyframe");
  }
  return seq;
}

double eval_against_reference(const FrameSequence& generated, const FrameSequence& reference) {
  if (generated.size() != reference.size()) {
    throw DimensionMismatch("generated clip has " + std::to_string(generated.size()) +
                            " frames, reference has " + std::to_string(reference.size()));
  }
  double total = 0.0;
  for (std::size_t t = 0; t < generated.size(); ++t) total += eval::mse(reference[t], generated[t]);
  return total / static_cast<double>(generated.size());
}

}  // namespace keyweave::video

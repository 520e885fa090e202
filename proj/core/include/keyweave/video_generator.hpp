// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "keyweave/model.hpp"
#include "keyweave/providers.hpp"

namespace keyweave::video {

/// Runs the interpolator between `start` and `end`, conditioned on the
/// optimization prompt, and checks the reply byte-for-byte: exactly
/// `frame_count` frames of the input size, frame 0 == start and the last
/// frame == end. Any breach throws ContractViolation naming the frame.
FrameSequence synthesize(const ImageBuffer& start, const ImageBuffer& end, const PromptBundle& bundle,
                         int frame_count, std::uint64_t seed, providers::Interpolator& interpolator);

/// Mean over frames of per-frame MSE (0..255 domain) between a generated clip
/// and a reference clip of the same shape.
double eval_against_reference(const FrameSequence& generated, const FrameSequence& reference);

}  // namespace keyweave::video

// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "keyweave/model.hpp"
#include "keyweave/providers.hpp"

namespace keyweave::eval {

/// Mean squared difference over every sample (H*W*3), 0..255 domain.
double mse(const ImageBuffer& a, const ImageBuffer& b);

/// MSE between the conditioning image and the first generated frame.
double mse_first(const ImageBuffer& input_image, const FrameSequence& video);

/// Mean over t of cos(embed(input), embed(frame_t)).
double clip_image_video(const ImageBuffer& input_image, const FrameSequence& video, providers::Embedder& embedder);

/// Mean over t of cos(embed_text(prompt), embed(frame_t)).
double clip_text_video(std::string_view prompt_text, const FrameSequence& video, providers::Embedder& embedder);

/// Mean cosine between adjacent frame embeddings; needs at least two frames.
double clip_temporal(const FrameSequence& video, providers::Embedder& embedder);

/// Mean over t of cos(embed(gen_t), embed(ref_t)).
double clip_corresponding(const FrameSequence& video, const FrameSequence& reference, providers::Embedder& embedder);

/// Same quantity as clip_corresponding, reported under temporal consistency.
double clip_refvideo(const FrameSequence& video, const FrameSequence& reference, providers::Embedder& embedder);

// Embedding-level forms, used when embeddings are computed once and shared.
double mean_cosine_to(const providers::Embedding& anchor, std::span<const providers::Embedding> frames);
double mean_adjacent_cosine(std::span<const providers::Embedding> frames);
double mean_paired_cosine(std::span<const providers::Embedding> a, std::span<const providers::Embedding> b);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

/// Mean local SSIM on BT.601 luma with a Gaussian window, valid positions
/// only. Images smaller than the window in either direction fall back to a
/// single global window with uniform weights.
double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params = {});

/// Mean SSIM over corresponding frames.
double ssim_video(const FrameSequence& a, const FrameSequence& b, const SsimParams& params = {});

/// Normalized 1-D Gaussian taps.
std::vector<double> gaussian_kernel(int size, double sigma);

}  // namespace keyweave::eval

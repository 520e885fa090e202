// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/metrics.hpp"

#include <cmath>
#include <string>

#include "keyweave/error.hpp"

namespace keyweave::eval {
namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionMismatch(std::string(what) + ": " + std::to_string(a.width()) + "x" +
                            std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                            std::to_string(b.height()));
  }
}

void require_same_length(const FrameSequence& a, const FrameSequence& b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionMismatch(std::string(what) + ": clip lengths " + std::to_string(a.size()) + " and " +
                            std::to_string(b.size()) + " differ");
  }
}

std::vector<providers::Embedding> embed_all(const FrameSequence& video, providers::Embedder& embedder) {
  std::vector<providers::Embedding> out;
  out.reserve(video.size());
  for (const auto& f : video.frames()) out.push_back(embedder.embed_image(f));
  return out;
}

}  // namespace

double mse(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b, "mse");
  const auto x = a.data();
  const auto y = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = static_cast<double>(x[i]) - static_cast<double>(y[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(x.size());
}

double mse_first(const ImageBuffer& input_image, const FrameSequence& video) {
  return mse(input_image, video.front());
}

double mean_cosine_to(const providers::Embedding& anchor, std::span<const providers::Embedding> frames) {
  if (frames.empty()) throw InvalidArgument("no frames to compare");
  double sum = 0.0;
  for (const auto& f : frames) sum += providers::cosine(anchor, f);
  return sum / static_cast<double>(frames.size());
}

double mean_adjacent_cosine(std::span<const providers::Embedding> frames) {
  if (frames.size() < 2) throw InvalidArgument("temporal consistency needs at least two frames");
  double sum = 0.0;
  for (std::size_t t = 0; t + 1 < frames.size(); ++t) sum += providers::cosine(frames[t], frames[t + 1]);
  return sum / static_cast<double>(frames.size() - 1);
}

double mean_paired_cosine(std::span<const providers::Embedding> a, std::span<const providers::Embedding> b) {
  if (a.size() != b.size()) throw DimensionMismatch("paired cosine over clips of different length");
  if (a.empty()) throw InvalidArgument("no frames to compare");
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) sum += providers::cosine(a[t], b[t]);
  return sum / static_cast<double>(a.size());
}

double clip_image_video(const ImageBuffer& input_image, const FrameSequence& video, providers::Embedder& embedder) {
  return mean_cosine_to(embedder.embed_image(input_image), embed_all(video, embedder));
}

double clip_text_video(std::string_view prompt_text, const FrameSequence& video, providers::Embedder& embedder) {
  return mean_cosine_to(embedder.embed_text(prompt_text), embed_all(video, embedder));
}

double clip_temporal(const FrameSequence& video, providers::Embedder& embedder) {
  if (video.size() < 2) throw InvalidArgument("temporal consistency needs at least two frames");
  return mean_adjacent_cosine(embed_all(video, embedder));
}

double clip_corresponding(const FrameSequence& video, const FrameSequence& reference,
                          providers::Embedder& embedder) {
  require_same_length(video, reference, "clip_corresponding");
  return mean_paired_cosine(embed_all(video, embedder), embed_all(reference, embedder));
}

double clip_refvideo(const FrameSequence& video, const FrameSequence& reference, providers::Embedder& embedder) {
  return clip_corresponding(video, reference, embedder);
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  if (size < 1 || !(sigma > 0.0)) throw InvalidArgument("gaussian kernel needs size >= 1 and sigma > 0");
  std::vector<double> k(static_cast<std::size_t>(size));
  const double centre = (size - 1) / 2.0;
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - centre;
    k[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    total += k[static_cast<std::size_t>(i)];
  }
  for (double& v : k) v /= total;
  return k;
}

namespace {

// Valid-mode separable filtering of a row-major plane.
std::vector<double> filter_valid(const std::vector<double>& plane, int w, int h, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1;
  const int oh = h - n + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * plane[static_cast<std::size_t>(y) * w + x + i];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

double ssim_term(double mu_a, double mu_b, double var_a, double var_b, double cov, double c1, double c2) {
  return ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
         ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
}

}  // namespace

double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params) {
  require_same_shape(a, b, "ssim");
  const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
  const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);
  const auto ya = luma(a);
  const auto yb = luma(b);
  const int w = a.width();
  const int h = a.height();

  if (w < params.window || h < params.window) {
    const double n = static_cast<double>(ya.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < ya.size(); ++i) {
      ma += ya[i];
      mb += yb[i];
    }
    ma /= n;
    mb /= n;
    double va = 0.0, vb = 0.0, cv = 0.0;
    for (std::size_t i = 0; i < ya.size(); ++i) {
      va += (ya[i] - ma) * (ya[i] - ma);
      vb += (yb[i] - mb) * (yb[i] - mb);
      cv += (ya[i] - ma) * (yb[i] - mb);
    }
    return ssim_term(ma, mb, va / n, vb / n, cv / n, c1, c2);
  }

  const auto k = gaussian_kernel(params.window, params.sigma);
  std::vector<double> aa(ya.size()), bb(ya.size()), ab(ya.size());
  for (std::size_t i = 0; i < ya.size(); ++i) {
    aa[i] = ya[i] * ya[i];
    bb[i] = yb[i] * yb[i];
    ab[i] = ya[i] * yb[i];
  }
  const auto mu_a = filter_valid(ya, w, h, k);
  const auto mu_b = filter_valid(yb, w, h, k);
  const auto e_aa = filter_valid(aa, w, h, k);
  const auto e_bb = filter_valid(bb, w, h, k);
  const auto e_ab = filter_valid(ab, w, h, k);

  double sum = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
    const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
    const double cov = e_ab[i] - mu_a[i] * mu_b[i];
    sum += ssim_term(mu_a[i], mu_b[i], var_a, var_b, cov, c1, c2);
  }
  return sum / static_cast<double>(mu_a.size());
}

double ssim_video(const FrameSequence& a, const FrameSequence& b, const SsimParams& params) {
  require_same_length(a, b, "ssim_video");
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) sum += ssim(a[t], b[t], params);
  return sum / static_cast<double>(a.size());
}

}  // namespace keyweave::eval

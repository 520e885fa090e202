// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/mock_providers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <unordered_set>

#include "keyweave/hashing.hpp"
#include "keyweave/prompt_enhancer.hpp"
#include "text_util.hpp"

namespace keyweave::providers {
namespace {

const std::unordered_set<std::string>& determiners() {
  static const std::unordered_set<std::string> words = {
      "a", "an", "the", "this", "that", "these", "those", "some", "my",
      "your", "his", "her", "its", "our", "their"};
  return words;
}

const std::unordered_set<std::string>& stop_words() {
  static const std::unordered_set<std::string> words = {
      "a", "an", "the", "this", "that", "these", "those", "some", "my", "your", "his", "her",
      "its", "our", "their", "and", "or", "but", "of", "on", "in", "at", "to", "from", "with",
      "by", "for", "over", "under", "into", "onto", "near", "beside", "behind", "above", "below",
      "across", "through", "while", "as", "is", "are", "was", "were", "be", "been", "being", "it",
      "they", "he", "she", "we", "you", "i", "them", "him", "us", "not", "no", "very", "slowly",
      "quickly", "then", "there", "here", "up", "down", "out", "away", "toward", "towards",
      "around", "along", "between"};
  return words;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool gap = false;
  for (char ch : text::trim(s)) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      gap = true;
    } else {
      if (gap && !out.empty()) out.push_back(' ');
      gap = false;
      out.push_back(ch);
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> mock_keywords(std::string_view text) {
  const auto tokens = text::word_tokens(text);
  std::vector<std::string> found;
  std::set<std::string> seen;
  auto add = [&](const std::string& w) {
    if (seen.insert(w).second) found.push_back(w);
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!determiners().contains(tokens[i])) continue;
    std::size_t j = i + 1;
    while (j < tokens.size() && !stop_words().contains(tokens[j])) ++j;
    const std::size_t run = j - (i + 1);
    if (run == 0) continue;
    std::size_t pick = j - 1;
    if (run >= 2 && tokens[pick].size() > 2 && tokens[pick].back() == 's') --pick;
    add(tokens[pick]);
  }
  if (found.empty()) {
    for (const auto& t : tokens) {
      if (!stop_words().contains(t)) add(t);
    }
  }
  if (found.empty() && !tokens.empty()) add(tokens.front());
  if (found.empty()) add("scene");
  return found;
}

std::string MockEnhancer::do_complete(const EnhanceQuery& query) {
  const auto keywords = mock_keywords(query.user_text);
  std::string subjects;
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    if (i > 0) subjects += ", ";
    subjects += keywords[i];
  }
  std::string frame_state = "The final frame shows " + subjects + ".";
  const auto hint = collapse_whitespace(query.hint);
  if (!hint.empty()) frame_state += " " + hint;
  const std::string optimization =
      collapse_whitespace(query.user_text) + ", smooth natural motion, consistent background";
  return prompt::render_bundle(PromptBundle(keywords, frame_state, optimization));
}

std::array<std::uint8_t, 3> label_color(std::string_view label) {
  const auto h = fnv1a64(text::lower(label));
  return {static_cast<std::uint8_t>(h & 0xff), static_cast<std::uint8_t>((h >> 8) & 0xff),
          static_cast<std::uint8_t>((h >> 16) & 0xff)};
}

MaskSet MockDetector::do_detect(const ImageBuffer& image, std::span<const std::string> labels) {
  std::vector<MaskEntry> entries;
  std::set<std::string> done;
  const auto px = image.data();
  for (const auto& label : labels) {
    if (!done.insert(text::lower(label)).second) continue;
    const auto color = label_color(label);
    std::vector<std::uint8_t> bits(image.pixel_count());
    std::size_t matched = 0;
    double deviation = 0.0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      int worst = 0;
      for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(int(px[3 * i + c]) - int(color[c])));
      if (worst <= tolerance_) {
        bits[i] = 1;
        ++matched;
        deviation += worst;
      }
    }
    if (matched == 0) continue;
    const double confidence = 1.0 - (deviation / static_cast<double>(matched)) / 255.0;
    entries.push_back({label, confidence, Mask(image.width(), image.height(), std::move(bits))});
  }
  return MaskSet(image.width(), image.height(), std::move(entries));
}

ImageBuffer MockKeyframeGenerator::do_generate(const ImageBuffer& image, const MaskSet& masks,
                                               std::string_view prompt, std::uint64_t seed) {
  SplitMix64 rng{seed ^ fnv1a64(prompt)};
  const std::array<int, 3> shift = {rng.uniform(-32, 32), rng.uniform(-32, 32), rng.uniform(-32, 32)};
  const Mask keep = masks.union_mask();
  std::vector<std::uint8_t> out(image.data().begin(), image.data().end());
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    if (keep.bits()[i]) continue;
    for (int c = 0; c < 3; ++c) {
      const int v = int(out[3 * i + c]) + shift[c] + rng.uniform(-8, 8);
      out[3 * i + c] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
    }
  }
  return ImageBuffer(image.width(), image.height(), std::move(out));
}

FrameSequence MockInterpolator::do_interpolate(const ImageBuffer& start, const ImageBuffer& end,
                                               std::string_view, int frame_count, std::uint64_t) {
  const std::int64_t den = frame_count - 1;
  const auto a = start.data();
  const auto b = end.data();
  std::vector<ImageBuffer> frames;
  frames.reserve(static_cast<std::size_t>(frame_count));
  for (std::int64_t t = 0; t < frame_count; ++t) {
    std::vector<std::uint8_t> px(a.size());
    for (std::size_t i = 0; i < px.size(); ++i) {
      const std::int64_t num = (den - t) * a[i] + t * b[i];
      px[i] = static_cast<std::uint8_t>((2 * num + den) / (2 * den));
    }
    frames.emplace_back(start.width(), start.height(), std::move(px));
  }
  return FrameSequence(std::move(frames), rate_);
}

std::vector<double> MockEmbedder::raw_image_vector(const ImageBuffer& image) {
  const auto y = luma(image);
  const int w = image.width();
  const int h = image.height();
  std::vector<double> v(kMockEmbeddingDim);
  for (int cy = 0; cy < 8; ++cy) {
    const int y0 = cy * h / 8;
    const int y1 = std::max((cy + 1) * h / 8, y0 + 1);
    for (int cx = 0; cx < 8; ++cx) {
      const int x0 = cx * w / 8;
      const int x1 = std::max((cx + 1) * w / 8, x0 + 1);
      double sum = 0.0;
      for (int yy = y0; yy < y1; ++yy) {
        for (int xx = x0; xx < x1; ++xx) sum += y[static_cast<std::size_t>(yy) * w + xx];
      }
      const double mean = sum / static_cast<double>((y1 - y0) * (x1 - x0));
      v[static_cast<std::size_t>(cy * 8 + cx)] = (mean - 127.5) / 127.5;
    }
  }
  return v;
}

std::vector<double> MockEmbedder::raw_text_vector(std::string_view text) {
  std::vector<double> v(kMockEmbeddingDim);
  for (const auto& tok : text::word_tokens(text)) v[fnv1a64(tok) % kMockEmbeddingDim] += 1.0;
  return v;
}

namespace {

std::vector<double> uniform_if_zero(std::vector<double> v) {
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) {
    std::fill(v.begin(), v.end(), 1.0);
  }
  return v;
}

}  // namespace

std::vector<double> MockEmbedder::do_embed_image(const ImageBuffer& image) {
  return uniform_if_zero(raw_image_vector(image));
}

std::vector<double> MockEmbedder::do_embed_text(std::string_view text) {
  return uniform_if_zero(raw_text_vector(text));
}

double MockQualityScorer::laplacian_variance(const ImageBuffer& frame) {
  const auto y = luma(frame);
  const int w = frame.width();
  const int h = frame.height();
  auto at = [&](int xx, int yy) {
    xx = std::clamp(xx, 0, w - 1);
    yy = std::clamp(yy, 0, h - 1);
    return y[static_cast<std::size_t>(yy) * w + xx];
  };
  double sum = 0.0;
  double sq = 0.0;
  for (int yy = 0; yy < h; ++yy) {
    for (int xx = 0; xx < w; ++xx) {
      const double lap = at(xx - 1, yy) + at(xx + 1, yy) + at(xx, yy - 1) + at(xx, yy + 1) - 4.0 * at(xx, yy);
      sum += lap;
      sq += lap * lap;
    }
  }
  const double n = static_cast<double>(w) * h;
  const double mean = sum / n;
  return std::max(0.0, sq / n - mean * mean);
}

double MockQualityScorer::do_score(const ImageBuffer& frame) {
  const double v = laplacian_variance(frame);
  return v / (v + kHalfScoreVariance);
}

ProviderSet make_mock_providers(FrameRate rate) {
  ProviderSet set;
  set.enhancer = std::make_shared<MockEnhancer>();
  set.detector = std::make_shared<MockDetector>();
  set.keyframe = std::make_shared<MockKeyframeGenerator>();
  set.interpolator = std::make_shared<MockInterpolator>(rate);
  set.embedder = std::make_shared<MockEmbedder>();
  set.scorer = std::make_shared<MockQualityScorer>();
  return set;
}

}  // namespace keyweave::providers

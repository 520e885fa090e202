// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "keyweave/error.hpp"
#include "keyweave/hashing.hpp"
#include "text_util.hpp"

namespace keyweave {

FrameSequence::FrameSequence(std::vector<ImageBuffer> frames, FrameRate rate)
    : frames_(std::move(frames)), rate_(rate) {
  if (frames_.empty()) {
    throw InvalidArgument("a frame sequence needs at least one frame");
  }
  if (rate_.num <= 0 || rate_.den <= 0) {
    throw InvalidArgument("frame rate must be a positive rational");
  }
  for (std::size_t t = 1; t < frames_.size(); ++t) {
    if (!frames_[t].same_shape(frames_[0])) {
      throw DimensionMismatch("frame " + std::to_string(t) + " is " +
                              std::to_string(frames_[t].width()) + "x" +
                              std::to_string(frames_[t].height()) + ", expected " +
                              std::to_string(frames_[0].width()) + "x" +
                              std::to_string(frames_[0].height()));
    }
  }
}

PromptBundle::PromptBundle(std::vector<std::string> keywords, std::string frame_state,
                           std::string optimization_prompt, std::string raw_user_text)
    : keywords_(std::move(keywords)),
      frame_state_(std::move(frame_state)),
      optimization_prompt_(std::move(optimization_prompt)),
      raw_user_text_(std::move(raw_user_text)) {
  if (keywords_.empty()) {
    throw InvalidArgument("prompt bundle needs at least one keyword");
  }
  for (const auto& k : keywords_) {
    if (text::trim(k).empty()) throw InvalidArgument("prompt bundle keyword is blank");
  }
  if (text::trim(frame_state_).empty()) throw InvalidArgument("frame state is blank");
  if (text::trim(optimization_prompt_).empty()) throw InvalidArgument("optimization prompt is blank");
}

PromptBundle PromptBundle::with_user_text(std::string text) const {
  return PromptBundle(keywords_, frame_state_, optimization_prompt_, std::move(text));
}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width_ < 1 || height_ < 1) throw InvalidArgument("mask dimensions must be positive");
  if (bits_.size() != static_cast<std::size_t>(width_) * height_) {
    throw InvalidArgument("mask data length does not match its dimensions");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

Mask Mask::empty(int width, int height) {
  return Mask(width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height));
}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Mask Mask::united(const Mask& other) const {
  if (other.width_ != width_ || other.height_ != height_) {
    throw DimensionMismatch("cannot unite masks of different sizes");
  }
  auto bits = bits_;
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] |= other.bits_[i];
  return Mask(width_, height_, std::move(bits));
}

MaskSet::MaskSet(int width, int height, std::vector<MaskEntry> entries)
    : width_(width), height_(height), entries_(std::move(entries)) {
  if (width_ < 1 || height_ < 1) throw InvalidArgument("mask set dimensions must be positive");
  for (const auto& e : entries_) {
    if (e.mask.width() != width_ || e.mask.height() != height_) {
      throw DimensionMismatch("mask '" + e.label + "' does not match the source image size");
    }
    if (!(e.confidence >= 0.0 && e.confidence <= 1.0)) {
      throw InvalidArgument("mask '" + e.label + "' confidence outside [0, 1]");
    }
  }
}

Mask MaskSet::union_mask() const {
  Mask acc = Mask::empty(width_, height_);
  for (const auto& e : entries_) acc = acc.united(e.mask);
  return acc;
}

void GenerationRequest::validate() const {
  if (frame_count < 2) throw InvalidArgument("frame_count must be at least 2");
  if (candidate_count < 1) throw InvalidArgument("candidate_count must be at least 1");
  if (!std::isfinite(lambda_mask) || lambda_mask < 0.0) {
    throw InvalidArgument("lambda_mask must be a non-negative real");
  }
  if (text::trim(user_text).empty()) throw InvalidArgument("user text is empty");
}

namespace {

class CanonicalWriter {
 public:
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void blob(std::span<const std::uint8_t> b) {
    u64(b.size());
    bytes_.insert(bytes_.end(), b.begin(), b.end());
  }
  void str(std::string_view s) {
    blob(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

}  // namespace

std::string content_digest(const GenerationRequest& request) {
  CanonicalWriter w;
  w.str("keyweave.request.v1");
  w.i64(request.input_image.width());
  w.i64(request.input_image.height());
  w.blob(request.input_image.data());
  w.str(request.user_text);
  w.i64(request.frame_count);
  w.u64(request.seed);
  w.f64(request.lambda_mask);
  w.i64(request.candidate_count);
  return sha256_hex(w.bytes());
}

}  // namespace keyweave

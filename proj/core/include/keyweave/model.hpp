// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "keyweave/image.hpp"

namespace keyweave {

/// Positive rational frame rate.
struct FrameRate {
  std::int64_t num = 8;
  std::int64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const FrameRate&, const FrameRate&) = default;
};

/// An ordered, equally-sized run of frames: a video.
class FrameSequence {
 public:
  /// Throws InvalidArgument on an empty list or a non-positive rate, and
  /// DimensionMismatch when frames disagree in size.
  explicit FrameSequence(std::vector<ImageBuffer> frames, FrameRate rate = {});

  std::size_t size() const noexcept { return frames_.size(); }
  const ImageBuffer& operator[](std::size_t t) const noexcept { return frames_[t]; }
  const ImageBuffer& front() const noexcept { return frames_.front(); }
  const ImageBuffer& back() const noexcept { return frames_.back(); }
  std::span<const ImageBuffer> frames() const noexcept { return frames_; }
  FrameRate rate() const noexcept { return rate_; }
  int width() const noexcept { return frames_.front().width(); }
  int height() const noexcept { return frames_.front().height(); }

  friend bool operator==(const FrameSequence&, const FrameSequence&) = default;

 private:
  std::vector<ImageBuffer> frames_;
  FrameRate rate_;
};

/// The three sub-prompts produced by enhancement plus the text they came from.
class PromptBundle {
 public:
  /// Throws InvalidArgument when keywords are empty, any keyword is blank
  /// after trimming, or either free-text field is blank.
  PromptBundle(std::vector<std::string> keywords, std::string frame_state,
               std::string optimization_prompt, std::string raw_user_text = {});

  const std::vector<std::string>& keywords() const noexcept { return keywords_; }
  const std::string& frame_state() const noexcept { return frame_state_; }
  const std::string& optimization_prompt() const noexcept { return optimization_prompt_; }
  const std::string& raw_user_text() const noexcept { return raw_user_text_; }

  PromptBundle with_user_text(std::string text) const;

  friend bool operator==(const PromptBundle&, const PromptBundle&) = default;

 private:
  std::vector<std::string> keywords_;
  std::string frame_state_;
  std::string optimization_prompt_;
  std::string raw_user_text_;
};

/// Binary raster; samples are 0 or 1.
class Mask {
 public:
  Mask(int width, int height, std::vector<std::uint8_t> bits);
  static Mask empty(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool at(int x, int y) const noexcept {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t count() const noexcept;

  Mask united(const Mask& other) const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

struct MaskEntry {
  std::string label;
  double confidence = 0.0;
  Mask mask;

  friend bool operator==(const MaskEntry&, const MaskEntry&) = default;
};

/// Labelled detection masks for one source image.
class MaskSet {
 public:
  /// Throws DimensionMismatch if any mask differs from width x height and
  /// InvalidArgument if a confidence falls outside [0, 1].
  MaskSet(int width, int height, std::vector<MaskEntry> entries = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const std::vector<MaskEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// Union of every entry; an all-zero mask when the set is empty.
  Mask union_mask() const;

  friend bool operator==(const MaskSet&, const MaskSet&) = default;

 private:
  int width_;
  int height_;
  std::vector<MaskEntry> entries_;
};

struct GenerationRequest {
  ImageBuffer input_image;
  std::string user_text;
  int frame_count = 16;
  std::uint64_t seed = 0;
  double lambda_mask = 0.5;
  int candidate_count = 4;

  /// Throws InvalidArgument on frame_count < 2, candidate_count < 1,
  /// a negative or non-finite lambda, or empty text.
  void validate() const;

  friend bool operator==(const GenerationRequest&, const GenerationRequest&) = default;
};

/// Hex SHA-256 over a canonical encoding of every request field.
std::string content_digest(const GenerationRequest& request);

}  // namespace keyweave

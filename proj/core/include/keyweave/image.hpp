// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace keyweave {

/// Dense 8-bit RGB raster, row-major, interleaved channels.
///
/// Immutable once built; copies are cheap enough at the working resolution
/// (256x256x3 = 192 KiB) that the pipeline passes them by value.
class ImageBuffer {
 public:
  static constexpr int kChannels = 3;

  /// Throws InvalidArgument unless width, height >= 1 and
  /// data.size() == width * height * 3.
  ImageBuffer(int width, int height, std::vector<std::uint8_t> data);

  /// Uniformly filled image.
  static ImageBuffer filled(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  std::span<const std::uint8_t> data() const noexcept { return data_; }

  std::uint8_t at(int x, int y, int c) const noexcept {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }

  bool same_shape(const ImageBuffer& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

/// Bilinear resampling with half-pixel centre alignment and edge clamping.
/// Results are rounded half-up to the nearest integer sample.
ImageBuffer resize_bilinear(const ImageBuffer& image, int width, int height);

/// Largest centred square crop.
ImageBuffer center_crop_square(const ImageBuffer& image);

/// Normalizes an input to the square working resolution: centre crop, then resize.
ImageBuffer ingest(const ImageBuffer& image, int resolution);

/// BT.601 luma of every pixel, row-major, in the 0..255 domain.
std::vector<double> luma(const ImageBuffer& image);

}  // namespace keyweave

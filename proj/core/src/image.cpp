// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "keyweave/error.hpp"

namespace keyweave {

ImageBuffer::ImageBuffer(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width_ < 1 || height_ < 1) {
    throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width_) +
                          "x" + std::to_string(height_));
  }
  if (data_.size() != pixel_count() * kChannels) {
    throw InvalidArgument("image data length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(width_) + "x" +
                          std::to_string(height_) + "x3");
  }
}

ImageBuffer ImageBuffer::filled(int width, int height, std::uint8_t r, std::uint8_t g,
                                std::uint8_t b) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("image dimensions must be positive");
  }
  std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height * kChannels);
  for (std::size_t i = 0; i < data.size(); i += kChannels) {
    data[i] = r;
    data[i + 1] = g;
    data[i + 2] = b;
  }
  return ImageBuffer(width, height, std::move(data));
}

namespace {

// Source taps for one destination index. The sample position is the exact
// rational ((2i + 1) * src - dst) / (2 * dst); `weight` is its fractional part
// scaled by `scale` = 2 * dst, so interpolation runs in integers and rounding
// half-up never depends on floating-point error.
struct Tap {
  int lo;
  int hi;
  std::int64_t weight;
};

std::vector<Tap> make_taps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  const std::int64_t scale = 2 * static_cast<std::int64_t>(dst);
  for (int i = 0; i < dst; ++i) {
    const std::int64_t pos = (2 * static_cast<std::int64_t>(i) + 1) * src - dst;
    Tap t{0, 0, 0};
    if (pos > 0) {
      t.lo = static_cast<int>(pos / scale);
      t.weight = pos % scale;
      if (t.lo >= src - 1) {
        t.lo = src - 1;
        t.weight = 0;
      }
      t.hi = std::min(t.lo + 1, src - 1);
    }
    taps[static_cast<std::size_t>(i)] = t;
  }
  return taps;
}

}  // namespace

ImageBuffer resize_bilinear(const ImageBuffer& image, int width, int height) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("resize target must be at least 1x1");
  }
  if (width == image.width() && height == image.height()) {
    return image;
  }
  const auto xs = make_taps(image.width(), width);
  const auto ys = make_taps(image.height(), height);
  const std::int64_t sx = 2 * static_cast<std::int64_t>(width);
  const std::int64_t sy = 2 * static_cast<std::int64_t>(height);
  const std::int64_t den = sx * sy;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * height * ImageBuffer::kChannels);
  std::size_t k = 0;
  for (const Tap& ty : ys) {
    for (const Tap& tx : xs) {
      for (int c = 0; c < ImageBuffer::kChannels; ++c) {
        const std::int64_t top = (sx - tx.weight) * image.at(tx.lo, ty.lo, c) + tx.weight * image.at(tx.hi, ty.lo, c);
        const std::int64_t bottom =
            (sx - tx.weight) * image.at(tx.lo, ty.hi, c) + tx.weight * image.at(tx.hi, ty.hi, c);
        const std::int64_t num = (sy - ty.weight) * top + ty.weight * bottom;
        out[k++] = static_cast<std::uint8_t>((2 * num + den) / (2 * den));
      }
    }
  }
  return ImageBuffer(width, height, std::move(out));
}

ImageBuffer center_crop_square(const ImageBuffer& image) {
  const int side = std::min(image.width(), image.height());
  if (side == image.width() && side == image.height()) {
    return image;
  }
  const int x0 = (image.width() - side) / 2;
  const int y0 = (image.height() - side) / 2;
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(side) * side * ImageBuffer::kChannels);
  const auto src = image.data();
  for (int y = y0; y < y0 + side; ++y) {
    const auto row = src.subspan((static_cast<std::size_t>(y) * image.width() + x0) * ImageBuffer::kChannels,
                                 static_cast<std::size_t>(side) * ImageBuffer::kChannels);
    out.insert(out.end(), row.begin(), row.end());
  }
  return ImageBuffer(side, side, std::move(out));
}

ImageBuffer ingest(const ImageBuffer& image, int resolution) {
  return resize_bilinear(center_crop_square(image), resolution, resolution);
}

std::vector<double> luma(const ImageBuffer& image) {
  std::vector<double> y(image.pixel_count());
  const auto d = image.data();
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = 0.299 * d[3 * i] + 0.587 * d[3 * i + 1] + 0.114 * d[3 * i + 2];
  }
  return y;
}

}  // namespace keyweave

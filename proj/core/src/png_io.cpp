// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/png_io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <string>
#include <system_error>
#include <unistd.h>

#include "keyweave/error.hpp"

namespace keyweave {
namespace {

struct ReadCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void read_callback(png_structp png, png_bytep out, png_size_t length) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->offset + length > cur->bytes.size()) {
    png_error(png, "truncated PNG stream");
  }
  std::memcpy(out, cur->bytes.data() + cur->offset, length);
  cur->offset += length;
}

void write_callback(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_callback(png_structp) {}

[[noreturn]] void error_callback(png_structp, png_const_charp message) {
  throw IoError(std::string("png: ") + message);
}

void warning_callback(png_structp, png_const_charp) {}

class ReadHandle {
 public:
  ReadHandle() {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, error_callback, warning_callback);
    if (png_ == nullptr) throw IoError("png: cannot allocate read struct");
    info_ = png_create_info_struct(png_);
    if (info_ == nullptr) {
      png_destroy_read_struct(&png_, nullptr, nullptr);
      throw IoError("png: cannot allocate info struct");
    }
  }
  ~ReadHandle() { png_destroy_read_struct(&png_, &info_, nullptr); }
  ReadHandle(const ReadHandle&) = delete;
  ReadHandle& operator=(const ReadHandle&) = delete;

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

class WriteHandle {
 public:
  WriteHandle() {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, error_callback, warning_callback);
    if (png_ == nullptr) throw IoError("png: cannot allocate write struct");
    info_ = png_create_info_struct(png_);
    if (info_ == nullptr) {
      png_destroy_write_struct(&png_, nullptr);
      throw IoError("png: cannot allocate info struct");
    }
  }
  ~WriteHandle() { png_destroy_write_struct(&png_, &info_); }
  WriteHandle(const WriteHandle&) = delete;
  WriteHandle& operator=(const WriteHandle&) = delete;

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

std::vector<std::uint8_t> encode_raw(int width, int height, int color_type, int channels,
                                     std::span<const std::uint8_t> samples) {
  WriteHandle h;
  std::vector<std::uint8_t> out;
  png_set_write_fn(h.png(), &out, write_callback, flush_callback);
  png_set_IHDR(h.png(), h.info(), static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(h.png(), h.info());
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) {
    png_write_row(h.png(), const_cast<png_bytep>(samples.data() + y * stride));
  }
  png_write_end(h.png(), nullptr);
  return out;
}

}  // namespace

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw IoError("png: not a PNG stream");
  }
  ReadHandle h;
  ReadCursor cursor{bytes, 0};
  png_set_read_fn(h.png(), &cursor, read_callback);
  png_read_info(h.png(), h.info());

  const auto color = png_get_color_type(h.png(), h.info());
  const auto depth = png_get_bit_depth(h.png(), h.info());
  if (depth == 16) png_set_strip_16(h.png());
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(h.png());
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(h.png());
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(h.png());
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(h.png());
  png_set_interlace_handling(h.png());
  png_read_update_info(h.png(), h.info());

  const int width = static_cast<int>(png_get_image_width(h.png(), h.info()));
  const int height = static_cast<int>(png_get_image_height(h.png(), h.info()));
  const std::size_t stride = png_get_rowbytes(h.png(), h.info());
  if (stride != static_cast<std::size_t>(width) * 3) {
    throw IoError("png: unexpected row layout after conversion");
  }
  std::vector<std::uint8_t> data(stride * static_cast<std::size_t>(height));
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[y] = data.data() + y * stride;
  png_read_image(h.png(), rows.data());
  png_read_end(h.png(), nullptr);
  return ImageBuffer(width, height, std::move(data));
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& image) {
  return encode_raw(image.width(), image.height(), PNG_COLOR_TYPE_RGB, 3, image.data());
}

Mask decode_mask_png(std::span<const std::uint8_t> bytes) {
  const ImageBuffer rgb = decode_png(bytes);
  std::vector<std::uint8_t> bits(rgb.pixel_count());
  const auto d = rgb.data();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = d[3 * i] >= 128 ? 1 : 0;
  return Mask(rgb.width(), rgb.height(), std::move(bits));
}

std::vector<std::uint8_t> encode_mask_png(const Mask& mask) {
  std::vector<std::uint8_t> gray(mask.bits().size());
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = mask.bits()[i] ? 255 : 0;
  return encode_raw(mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, 1, gray);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

ImageBuffer read_png(const std::filesystem::path& path) { return decode_png(read_file(path)); }

void write_png(const std::filesystem::path& path, const ImageBuffer& image) {
  write_file_atomic(path, encode_png(image));
}

Mask read_mask_png(const std::filesystem::path& path) { return decode_mask_png(read_file(path)); }

void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
  write_file_atomic(path, encode_mask_png(mask));
}

}  // namespace keyweave

// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "keyweave/image.hpp"
#include "keyweave/model.hpp"

namespace keyweave {

// Decoding accepts gray, gray+alpha, palette, RGB and RGBA at 8 or 16 bits;
// alpha is dropped and 16-bit samples are reduced to their high byte.

ImageBuffer decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const ImageBuffer& image);

/// Masks travel as single-channel PNGs holding 0 or 255.
Mask decode_mask_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_mask_png(const Mask& mask);

ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageBuffer& image);
Mask read_mask_png(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const Mask& mask);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
/// Writes to a sibling temp file then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace keyweave

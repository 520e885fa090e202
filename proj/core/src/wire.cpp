// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "wire.hpp"

#include "keyweave/error.hpp"
#include "keyweave/hashing.hpp"
#include "keyweave/png_io.hpp"

namespace keyweave::wire {

std::string image_to_b64(const ImageBuffer& image) { return base64_encode(encode_png(image)); }

ImageBuffer image_from_b64(std::string_view b64) { return decode_png(base64_decode(b64)); }

json masks_to_json(const MaskSet& masks) {
  json out = json::array();
  for (const auto& e : masks.entries()) {
    out.push_back({{"label", e.label},
                   {"confidence", e.confidence},
                   {"mask_png_b64", base64_encode(encode_mask_png(e.mask))}});
  }
  return out;
}

MaskSet masks_from_json(const json& entries, int width, int height) {
  if (!entries.is_array()) throw ParseError("mask entries must be an array");
  std::vector<MaskEntry> out;
  for (const auto& e : entries) {
    out.push_back({field<std::string>(e, "label"), field<double>(e, "confidence"),
                   decode_mask_png(base64_decode(field<std::string>(e, "mask_png_b64")))});
  }
  return MaskSet(width, height, std::move(out));
}

json error_body(std::string_view code, std::string_view message) {
  return {{"code", code}, {"message", message}};
}

}  // namespace keyweave::wire

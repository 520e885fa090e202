// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "keyweave/error.hpp"
#include "keyweave/image.hpp"
#include "keyweave/model.hpp"

namespace keyweave::wire {

using json = nlohmann::json;

inline constexpr const char* kEnhance = "/v1/enhance";
inline constexpr const char* kDetect = "/v1/detect";
inline constexpr const char* kKeyframe = "/v1/keyframe";
inline constexpr const char* kInterpolate = "/v1/interpolate";
inline constexpr const char* kEmbedImage = "/v1/embed_image";
inline constexpr const char* kEmbedText = "/v1/embed_text";
inline constexpr const char* kScore = "/v1/score";
inline constexpr const char* kHealth = "/v1/health";

std::string image_to_b64(const ImageBuffer& image);
/// Throws ParseError or IoError on a bad payload.
ImageBuffer image_from_b64(std::string_view b64);

/// [{label, confidence, mask_png_b64}, ...]
json masks_to_json(const MaskSet& masks);
MaskSet masks_from_json(const json& entries, int width, int height);

json error_body(std::string_view code, std::string_view message);

/// Field accessor that throws ParseError naming the missing/mistyped key.
template <class T>
T field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace keyweave::wire

// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/artifact.hpp"

#include <cstdio>
#include <optional>

#include <json.hpp>

#include "keyweave/error.hpp"
#include "keyweave/png_io.hpp"

namespace keyweave {

void GenerationArtifact::validate() const {
  if (video.size() != static_cast<std::size_t>(request.frame_count)) {
    throw ContractViolation("artifact video has " + std::to_string(video.size()) + " frames, request asked for " +
                            std::to_string(request.frame_count));
  }
  if (video.front() != request.input_image) {
    throw ContractViolation("artifact frame 0 is not the request image");
  }
  if (video.back() != end_frame) {
    throw ContractViolation("artifact last frame is not the end keyframe");
  }
}

bool same_content(const GenerationArtifact& a, const GenerationArtifact& b) {
  return a.request_digest == b.request_digest && a.request == b.request && a.prompt_bundle == b.prompt_bundle &&
         a.mask_set == b.mask_set && a.end_frame == b.end_frame && a.video == b.video &&
         a.provenance == b.provenance;
}

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%05zu.png", index);
  return buf;
}

void write_frames(const std::filesystem::path& dir, const FrameSequence& video) {
  std::filesystem::create_directories(dir);
  for (std::size_t t = 0; t < video.size(); ++t) write_png(dir / frame_file_name(t), video[t]);
}

void write_video_dir(const std::filesystem::path& dir, const FrameSequence& video,
                     const std::vector<ProvenanceRecord>& provenance) {
  write_frames(dir, video);
  nlohmann::ordered_json m;
  m["fps"] = {{"num", video.rate().num}, {"den", video.rate().den}};
  m["width"] = video.width();
  m["height"] = video.height();
  m["frame_count"] = video.size();
  m["provenance"] = nlohmann::ordered_json::array();
  for (const auto& p : provenance) {
    m["provenance"].push_back({{"stage", p.stage}, {"role", p.role}, {"provider", p.provider}});
  }
  write_text_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

FrameSequence read_video_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  FrameRate rate;
  std::optional<std::size_t> count;
  const auto manifest = dir / "manifest.json";
  if (std::filesystem::exists(manifest)) {
    const auto bytes = read_file(manifest);
    const auto m = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (m.is_discarded() || !m.is_object()) throw ParseError("malformed " + manifest.string());
    try {
      if (m.contains("fps")) rate = {m["fps"].at("num").get<std::int64_t>(), m["fps"].at("den").get<std::int64_t>()};
      if (m.contains("frame_count")) count = m["frame_count"].get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("malformed " + manifest.string() + ": " + e.what());
    }
  }
  std::vector<ImageBuffer> frames;
  for (std::size_t t = 0;; ++t) {
    if (count && t == *count) break;
    const auto file = dir / frame_file_name(t);
    if (!std::filesystem::exists(file)) {
      if (count) throw IoError("missing " + file.string());
      break;
    }
    frames.push_back(read_png(file));
  }
  if (frames.empty()) throw IoError("no frames in " + dir.string());
  return FrameSequence(std::move(frames), rate);
}

}  // namespace keyweave

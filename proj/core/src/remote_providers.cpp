// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/remote_providers.hpp"

#include <httplib.h>

#include <cstdlib>
#include <regex>

#include "keyweave/error.hpp"
#include "wire.hpp"

namespace keyweave::providers {
namespace {

using wire::json;

ProviderErrorKind classify(httplib::Error err) {
  switch (err) {
    case httplib::Error::ConnectionTimeout: return ProviderErrorKind::kTimeout;
    default: return ProviderErrorKind::kTransport;
  }
}

class HttpChannel {
 public:
  HttpChannel(ProviderEndpoint ep, RemoteOptions opts) : ep_(std::move(ep)), opts_(std::move(opts)) {
    ep_.validate();
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(ep_.base_url, m, url_re)) {
      throw ConfigError(std::string(to_string(ep_.role)) + ": base_url '" + ep_.base_url +
                        "' is not an http(s) URL");
    }
    origin_ = m[1].str();
    prefix_ = m[2].matched ? m[2].str() : std::string();
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  std::string identity() const { return "remote:" + ep_.base_url; }

  json post(const char* route, const json& body) const {
    const Sleeper sleep = [this](std::chrono::milliseconds d) {
      if (opts_.retry_counter) opts_.retry_counter->fetch_add(1);
      opts_.sleeper(d);
    };
    return with_retry(ep_.retry_policy(), [&] { return post_once(route, body); }, sleep);
  }

 private:
  json post_once(const char* route, const json& body) const {
    httplib::Client cli(origin_);
    cli.set_connection_timeout(ep_.timeout);
    cli.set_read_timeout(ep_.timeout);
    cli.set_write_timeout(ep_.timeout);
    if (opts_.bearer_token) cli.set_bearer_token_auth(*opts_.bearer_token);

    const std::string path = prefix_ + route;
    auto res = cli.Post(path, body.dump(), "application/json");
    if (!res) {
      throw ProviderError(classify(res.error()),
                          "POST " + ep_.base_url + route + ": " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
      std::string detail = "HTTP " + std::to_string(res->status);
      const auto parsed = json::parse(res->body, nullptr, false);
      if (parsed.is_object() && parsed.contains("code")) {
        detail += " " + parsed.value("code", std::string()) + ": " + parsed.value("message", std::string());
      }
      throw ProviderError(ProviderErrorKind::kStatus, "POST " + ep_.base_url + route + ": " + detail,
                          res->body, res->status);
    }
    auto parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
      throw ProviderError(ProviderErrorKind::kDecode, "POST " + ep_.base_url + route + ": body is not JSON",
                          res->body, res->status);
    }
    return parsed;
  }

  ProviderEndpoint ep_;
  RemoteOptions opts_;
  std::string origin_;
  std::string prefix_;
};

/// Runs a decoder over a response, turning decode failures into ProviderError.
template <class F>
auto decode(const json& body, const char* route, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ProviderError&) {
    throw;
  } catch (const Error& e) {
    throw ProviderError(ProviderErrorKind::kDecode, std::string(route) + ": " + e.what(), body.dump());
  }
}

class RemoteEnhancer final : public Enhancer {
 public:
  RemoteEnhancer(const ProviderEndpoint& ep, const RemoteOptions& opts) : ch_(ep, opts) {}
  std::string identity() const override { return ch_.identity(); }

 protected:
  std::string do_complete(const EnhanceQuery& q) override {
    const json body = ch_.post(wire::kEnhance,
                               {{"text", q.user_text}, {"hint", q.hint}, {"instruction", q.instruction}});
    // Render the structured reply in the labelled-section grammar; anything
    // that does not fit is handed back raw so the caller's parser rejects it
    // and keeps the payload.
    const bool well_typed = body.is_object() && body.contains("keywords") && body["keywords"].is_array() &&
                            body.contains("frame_state") && body["frame_state"].is_string() &&
                            body.contains("optimization_prompt") && body["optimization_prompt"].is_string();
    if (!well_typed) return body.dump();
    std::string out = "KEYWORDS: ";
    bool first = true;
    for (const auto& k : body["keywords"]) {
      if (!k.is_string()) return body.dump();
      if (!first) out += ", ";
      out += k.get<std::string>();
      first = false;
    }
    out += "\nFRAME_STATE: " + body["frame_state"].get<std::string>();
    out += "\nOPTIMIZATION: " + body["optimization_prompt"].get<std::string>() + "\n";
    return out;
  }

 private:
  HttpChannel ch_;
};

class RemoteDetector final : public Detector {
 public:
  RemoteDetector(const ProviderEndpoint& ep, const RemoteOptions& opts) : ch_(ep, opts) {}
  std::string identity() const override { return ch_.identity(); }

 protected:
  MaskSet do_detect(const ImageBuffer& image, std::span<const std::string> labels) override {
    const json body = ch_.post(wire::kDetect, {{"image_png_b64", wire::image_to_b64(image)},
                                               {"labels", std::vector<std::string>(labels.begin(), labels.end())}});
    return decode(body, wire::kDetect, [&] {
      return wire::masks_from_json(wire::field<json>(body, "entries"), image.width(), image.height());
    });
  }

 private:
  HttpChannel ch_;
};

class RemoteKeyframe final : public KeyframeGenerator {
 public:
  RemoteKeyframe(const ProviderEndpoint& ep, const RemoteOptions& opts) : ch_(ep, opts) {}
  std::string identity() const override { return ch_.identity(); }

 protected:
  ImageBuffer do_generate(const ImageBuffer& image, const MaskSet& masks, std::string_view prompt,
                          std::uint64_t seed) override {
    const json body = ch_.post(wire::kKeyframe, {{"image_png_b64", wire::image_to_b64(image)},
                                                 {"masks", wire::masks_to_json(masks)},
                                                 {"prompt", prompt},
                                                 {"seed", seed}});
    return decode(body, wire::kKeyframe,
                  [&] { return wire::image_from_b64(wire::field<std::string>(body, "image_png_b64")); });
  }

 private:
  HttpChannel ch_;
};

class RemoteInterpolator final : public Interpolator {
 public:
  RemoteInterpolator(const ProviderEndpoint& ep, const RemoteOptions& opts) : ch_(ep, opts) {}
  std::string identity() const override { return ch_.identity(); }

 protected:
  FrameSequence do_interpolate(const ImageBuffer& start, const ImageBuffer& end, std::string_view prompt,
                               int frame_count, std::uint64_t seed) override {
    const json body = ch_.post(wire::kInterpolate, {{"start_png_b64", wire::image_to_b64(start)},
                                                    {"end_png_b64", wire::image_to_b64(end)},
                                                    {"prompt", prompt},
                                                    {"frame_count", frame_count},
                                                    {"seed", seed}});
    return decode(body, wire::kInterpolate, [&] {
      std::vector<ImageBuffer> frames;
      for (const auto& f : wire::field<std::vector<std::string>>(body, "frames")) {
        frames.push_back(wire::image_from_b64(f));
      }
      return FrameSequence(std::move(frames));
    });
  }

 private:
  HttpChannel ch_;
};

class RemoteEmbedder final : public Embedder {
 public:
  RemoteEmbedder(const ProviderEndpoint& ep, const RemoteOptions& opts) : ch_(ep, opts) {}
  std::string identity() const override { return ch_.identity(); }

 protected:
  std::vector<double> do_embed_image(const ImageBuffer& image) override {
    const json body = ch_.post(wire::kEmbedImage, {{"image_png_b64", wire::image_to_b64(image)}});
    return decode(body, wire::kEmbedImage, [&] { return wire::field<std::vector<double>>(body, "values"); });
  }
  std::vector<double> do_embed_text(std::string_view text) override {
    const json body = ch_.post(wire::kEmbedText, {{"text", text}});
    return decode(body, wire::kEmbedText, [&] { return wire::field<std::vector<double>>(body, "values"); });
  }

 private:
  HttpChannel ch_;
};

class RemoteScorer final : public QualityScorer {
 public:
  RemoteScorer(const ProviderEndpoint& ep, const RemoteOptions& opts) : ch_(ep, opts) {}
  std::string identity() const override { return ch_.identity(); }

 protected:
  double do_score(const ImageBuffer& frame) override {
    const json body = ch_.post(wire::kScore, {{"image_png_b64", wire::image_to_b64(frame)}});
    return decode(body, wire::kScore, [&] { return wire::field<double>(body, "score"); });
  }

 private:
  HttpChannel ch_;
};

}  // namespace

std::optional<std::string> token_from_env() {
  const char* v = std::getenv(kTokenEnvVar);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

std::shared_ptr<Enhancer> make_remote_enhancer(const ProviderEndpoint& ep, const RemoteOptions& opts) {
  return std::make_shared<RemoteEnhancer>(ep, opts);
}
std::shared_ptr<Detector> make_remote_detector(const ProviderEndpoint& ep, const RemoteOptions& opts) {
  return std::make_shared<RemoteDetector>(ep, opts);
}
std::shared_ptr<KeyframeGenerator> make_remote_keyframe(const ProviderEndpoint& ep, const RemoteOptions& opts) {
  return std::make_shared<RemoteKeyframe>(ep, opts);
}
std::shared_ptr<Interpolator> make_remote_interpolator(const ProviderEndpoint& ep, const RemoteOptions& opts) {
  return std::make_shared<RemoteInterpolator>(ep, opts);
}
std::shared_ptr<Embedder> make_remote_embedder(const ProviderEndpoint& ep, const RemoteOptions& opts) {
  return std::make_shared<RemoteEmbedder>(ep, opts);
}
std::shared_ptr<QualityScorer> make_remote_scorer(const ProviderEndpoint& ep, const RemoteOptions& opts) {
  return std::make_shared<RemoteScorer>(ep, opts);
}

}  // namespace keyweave::providers

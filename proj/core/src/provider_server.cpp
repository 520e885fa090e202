// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/provider_server.hpp"

#include <httplib.h>

#include <thread>

#include "keyweave/prompt_enhancer.hpp"
#include "wire.hpp"

namespace keyweave::providers {

using wire::json;

struct ProviderServer::Impl {
  ProviderSet providers;
  FaultInjector faults;
  httplib::Server server;
  std::thread thread;
  std::string host = "127.0.0.1";
  int port = 0;

  void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  template <class Handler>
  void route(const char* path, bool enabled, Handler handler) {
    server.Post(path, [this, path, enabled, handler](const httplib::Request& req, httplib::Response& res) {
      if (faults) {
        if (auto f = faults(path)) {
          reply(res, f->status, wire::error_body(f->code, f->message));
          return;
        }
      }
      if (!enabled) {
        reply(res, 404, wire::error_body("route_disabled", std::string(path) + " has no provider"));
        return;
      }
      const auto body = json::parse(req.body, nullptr, false);
      if (!body.is_object()) {
        reply(res, 400, wire::error_body("bad_request", "body must be a JSON object"));
        return;
      }
      try {
        reply(res, 200, handler(body));
      } catch (const ParseError& e) {
        reply(res, 400, wire::error_body("bad_request", e.what()));
      } catch (const InvalidArgument& e) {
        reply(res, 400, wire::error_body("invalid_argument", e.what()));
      } catch (const DimensionMismatch& e) {
        reply(res, 400, wire::error_body("dimension_mismatch", e.what()));
      } catch (const IoError& e) {
        reply(res, 400, wire::error_body("decode_failure", e.what()));
      } catch (const std::exception& e) {
        reply(res, 500, wire::error_body("provider_error", e.what()));
      }
    });
  }

  void install_routes() {
    route(wire::kEnhance, providers.enhancer != nullptr, [this](const json& b) {
      const auto text = wire::field<std::string>(b, "text");
      const auto hint = b.value("hint", std::string());
      EnhanceQuery q{b.value("instruction", std::string()), text, hint};
      if (q.instruction.empty()) {
        q.instruction = prompt::build_instruction(text, hint, prompt::EnhancerTemplate::default_template());
      }
      const std::string raw = providers.enhancer->complete(q);
      try {
        const auto bundle = prompt::parse_bundle(raw);
        return json{{"keywords", bundle.keywords()},
                    {"frame_state", bundle.frame_state()},
                    {"optimization_prompt", bundle.optimization_prompt()}};
      } catch (const Error&) {
        return json{{"raw", raw}};
      }
    });
    route(wire::kDetect, providers.detector != nullptr, [this](const json& b) {
      const auto image = wire::image_from_b64(wire::field<std::string>(b, "image_png_b64"));
      const auto labels = wire::field<std::vector<std::string>>(b, "labels");
      return json{{"entries", wire::masks_to_json(providers.detector->detect(image, labels))}};
    });
    route(wire::kKeyframe, providers.keyframe != nullptr, [this](const json& b) {
      const auto image = wire::image_from_b64(wire::field<std::string>(b, "image_png_b64"));
      const auto masks = wire::masks_from_json(b.value("masks", json::array()), image.width(), image.height());
      const auto out = providers.keyframe->generate_keyframe(image, masks, wire::field<std::string>(b, "prompt"),
                                                             wire::field<std::uint64_t>(b, "seed"));
      return json{{"image_png_b64", wire::image_to_b64(out)}};
    });
    route(wire::kInterpolate, providers.interpolator != nullptr, [this](const json& b) {
      const auto start = wire::image_from_b64(wire::field<std::string>(b, "start_png_b64"));
      const auto end = wire::image_from_b64(wire::field<std::string>(b, "end_png_b64"));
      const auto seq = providers.interpolator->interpolate(start, end, b.value("prompt", std::string()),
                                                           wire::field<int>(b, "frame_count"),
                                                           b.value("seed", std::uint64_t{0}));
      json frames = json::array();
      for (const auto& f : seq.frames()) frames.push_back(wire::image_to_b64(f));
      return json{{"frames", std::move(frames)}};
    });
    route(wire::kEmbedImage, providers.embedder != nullptr, [this](const json& b) {
      const auto image = wire::image_from_b64(wire::field<std::string>(b, "image_png_b64"));
      return json{{"values", providers.embedder->embed_image(image).values}};
    });
    route(wire::kEmbedText, providers.embedder != nullptr, [this](const json& b) {
      return json{{"values", providers.embedder->embed_text(wire::field<std::string>(b, "text")).values}};
    });
    route(wire::kScore, providers.scorer != nullptr, [this](const json& b) {
      const auto image = wire::image_from_b64(wire::field<std::string>(b, "image_png_b64"));
      return json{{"score", providers.scorer->score_quality(image)}};
    });
    server.Get(wire::kHealth, [this](const httplib::Request&, httplib::Response& res) {
      json roles = json::object();
      for (const auto& [role, id] : providers.identities()) roles[role] = id;
      reply(res, 200, {{"status", "ok"}, {"roles", roles}});
    });
  }
};

ProviderServer::ProviderServer(ProviderSet providers, FaultInjector faults) : impl_(std::make_unique<Impl>()) {
  impl_->providers = std::move(providers);
  impl_->faults = std::move(faults);
  impl_->install_routes();
}

ProviderServer::~ProviderServer() { stop(); }

int ProviderServer::start(const std::string& host, int port) {
  impl_->host = host;
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port < 0) throw IoError("cannot bind provider server to " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void ProviderServer::listen(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port)) {
    throw IoError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void ProviderServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string ProviderServer::base_url() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port);
}

}  // namespace keyweave::providers

// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/config.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>
#include <toml.hpp>

#include "keyweave/error.hpp"
#include "keyweave/mock_providers.hpp"
#include "keyweave/png_io.hpp"

namespace keyweave::pipeline {
namespace {

using providers::ProviderEndpoint;
using providers::Role;

template <class T>
T get_or(const toml::table& t, std::string_view key, T fallback) {
  const auto* node = t.get(key);
  if (node == nullptr) return fallback;
  if (auto v = node->value<T>()) return *v;
  throw ConfigError("config key '" + std::string(key) + "' has the wrong type");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

FrameRate parse_fps(const toml::node& node) {
  if (auto n = node.value<std::int64_t>()) return {*n, 1};
  if (const auto* arr = node.as_array(); arr != nullptr && arr->size() == 2) {
    const auto num = (*arr)[0].value<std::int64_t>();
    const auto den = (*arr)[1].value<std::int64_t>();
    if (num && den) return {*num, *den};
  }
  throw ConfigError("pipeline.fps must be an integer or a [num, den] pair");
}

}  // namespace

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig c;
  for (Role r : providers::kAllRoles) {
    ProviderEndpoint ep;
    ep.role = r;
    ep.base_url = std::string(kMockUrl);
    c.endpoints[r] = ep;
  }
  return c;
}

void PipelineConfig::validate() const {
  if (frame_count < 2) throw ConfigError("frame_count must be at least 2");
  if (candidate_count < 1) throw ConfigError("candidate_count must be at least 1");
  if (!std::isfinite(lambda_mask) || lambda_mask < 0.0) throw ConfigError("lambda_mask must be >= 0");
  if (working_resolution < 1) throw ConfigError("working_resolution must be positive");
  if (!(confidence_floor >= 0.0 && confidence_floor <= 1.0)) throw ConfigError("confidence_floor must be in [0, 1]");
  if (enhance_attempts < 1) throw ConfigError("enhance_attempts must be at least 1");
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (fps.num <= 0 || fps.den <= 0) throw ConfigError("fps must be positive");
  for (Role r : providers::kAllRoles) {
    const auto it = endpoints.find(r);
    if (it == endpoints.end()) {
      if (r != Role::kScorer) throw ConfigError("no provider configured for role " + std::string(to_string(r)));
      continue;
    }
    it->second.validate();
  }
  std::error_code ec;
  std::filesystem::create_directories(artifact_root, ec);
  if (ec || !std::filesystem::is_directory(artifact_root)) {
    throw ConfigError("artifact root '" + artifact_root.string() + "' cannot be created");
  }
}

std::string PipelineConfig::snapshot_json() const {
  nlohmann::ordered_json j;
  j["lambda_mask"] = lambda_mask;
  j["candidate_count"] = candidate_count;
  j["frame_count"] = frame_count;
  j["fps"] = {{"num", fps.num}, {"den", fps.den}};
  j["working_resolution"] = working_resolution;
  j["confidence_floor"] = confidence_floor;
  j["enhance_attempts"] = enhance_attempts;
  j["seed"] = seed;
  j["template"] = template_path ? nlohmann::ordered_json(template_path->filename().string()) : nullptr;
  auto& eps = j["providers"] = nlohmann::ordered_json::object();
  for (const auto& [role, ep] : endpoints) {
    eps[std::string(to_string(role))] = {{"url", ep.base_url},
                                         {"timeout_ms", ep.timeout.count()},
                                         {"max_retries", ep.max_retries},
                                         {"backoff_base_ms", ep.backoff_base.count()}};
  }
  return j.dump();
}

PipelineConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(msg.str());
  }

  PipelineConfig c = PipelineConfig::defaults();
  if (const auto* p = root["pipeline"].as_table()) {
    c.lambda_mask = get_or<double>(*p, "lambda_mask", c.lambda_mask);
    c.candidate_count = static_cast<int>(get_or<std::int64_t>(*p, "candidate_count", c.candidate_count));
    c.frame_count = static_cast<int>(get_or<std::int64_t>(*p, "frame_count", c.frame_count));
    c.working_resolution = static_cast<int>(get_or<std::int64_t>(*p, "working_resolution", c.working_resolution));
    c.confidence_floor = get_or<double>(*p, "confidence_floor", c.confidence_floor);
    c.enhance_attempts = static_cast<int>(get_or<std::int64_t>(*p, "enhance_attempts", c.enhance_attempts));
    c.seed = static_cast<std::uint64_t>(get_or<std::int64_t>(*p, "seed", static_cast<std::int64_t>(c.seed)));
    c.cache_enabled = get_or<bool>(*p, "cache", c.cache_enabled);
    c.parallelism = static_cast<int>(get_or<std::int64_t>(*p, "parallelism", c.parallelism));
    c.artifact_root = resolve(base_dir, get_or<std::string>(*p, "artifact_root", c.artifact_root.string()));
    if (const auto* fps = p->get("fps")) c.fps = parse_fps(*fps);
    if (p->contains("template")) c.template_path = resolve(base_dir, get_or<std::string>(*p, "template", ""));
  }

  ProviderEndpoint base;
  if (const auto* r = root["retry"].as_table()) {
    base.max_retries = static_cast<int>(get_or<std::int64_t>(*r, "max_retries", base.max_retries));
    base.backoff_base = std::chrono::milliseconds(get_or<std::int64_t>(*r, "backoff_base_ms", base.backoff_base.count()));
    base.timeout = std::chrono::milliseconds(get_or<std::int64_t>(*r, "timeout_ms", base.timeout.count()));
  }
  for (auto& [role, ep] : c.endpoints) {
    ep.max_retries = base.max_retries;
    ep.backoff_base = base.backoff_base;
    ep.timeout = base.timeout;
  }

  if (const auto* ps = root["providers"].as_table()) {
    for (const auto& [key, node] : *ps) {
      const Role role = providers::role_from_string(key.str());
      ProviderEndpoint ep = c.endpoints[role];
      ep.role = role;
      if (auto url = node.value<std::string>()) {
        ep.base_url = *url;
      } else if (const auto* t = node.as_table()) {
        ep.base_url = get_or<std::string>(*t, "url", ep.base_url);
        ep.timeout = std::chrono::milliseconds(get_or<std::int64_t>(*t, "timeout_ms", ep.timeout.count()));
        ep.max_retries = static_cast<int>(get_or<std::int64_t>(*t, "max_retries", ep.max_retries));
        ep.backoff_base =
            std::chrono::milliseconds(get_or<std::int64_t>(*t, "backoff_base_ms", ep.backoff_base.count()));
      } else {
        throw ConfigError("providers." + std::string(key.str()) + " must be a URL string or a table");
      }
      if (ep.base_url == "none") {
        if (role != Role::kScorer) {
          throw ConfigError("role " + std::string(key.str()) + " is required and cannot be 'none'");
        }
        c.endpoints.erase(role);
      } else {
        c.endpoints[role] = ep;
      }
    }
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                      path.parent_path());
}

long RetryCounters::total(std::initializer_list<providers::Role> roles) const {
  long sum = 0;
  for (auto r : roles) {
    if (auto it = by_role.find(r); it != by_role.end()) sum += it->second->load();
  }
  return sum;
}

BuiltProviders make_providers(const PipelineConfig& config, providers::RemoteOptions options) {
  BuiltProviders out;
  auto mocks = providers::make_mock_providers(config.fps);
  auto opts_for = [&](Role r) {
    auto o = options;
    o.retry_counter = std::make_shared<std::atomic<long>>(0);
    out.retries.by_role[r] = o.retry_counter;
    return o;
  };
  for (const auto& [role, ep] : config.endpoints) {
    const bool mock = ep.base_url == kMockUrl;
    switch (role) {
      case Role::kEnhancer:
        out.set.enhancer = mock ? mocks.enhancer : providers::make_remote_enhancer(ep, opts_for(role));
        break;
      case Role::kDetector:
        out.set.detector = mock ? mocks.detector : providers::make_remote_detector(ep, opts_for(role));
        break;
      case Role::kKeyframe:
        out.set.keyframe = mock ? mocks.keyframe : providers::make_remote_keyframe(ep, opts_for(role));
        break;
      case Role::kInterpolator:
        out.set.interpolator = mock ? mocks.interpolator : providers::make_remote_interpolator(ep, opts_for(role));
        break;
      case Role::kEmbedder:
        out.set.embedder = mock ? mocks.embedder : providers::make_remote_embedder(ep, opts_for(role));
        break;
      case Role::kScorer:
        out.set.scorer = mock ? mocks.scorer : providers::make_remote_scorer(ep, opts_for(role));
        break;
    }
  }
  out.set.validate();
  return out;
}

}  // namespace keyweave::pipeline

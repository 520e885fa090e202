// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "keyweave/providers.hpp"

namespace keyweave::providers {

struct ServerFault {
  int status = 503;
  std::string code = "injected_fault";
  std::string message = "fault injected";
};

/// Consulted before each request; returning a fault short-circuits the route.
using FaultInjector = std::function<std::optional<ServerFault>(std::string_view route)>;

/// Serves the provider wire protocol on top of any ProviderSet. Roles left
/// null answer 404 with code "route_disabled".
class ProviderServer {
 public:
  explicit ProviderServer(ProviderSet providers, FaultInjector faults = {});
  ~ProviderServer();
  ProviderServer(const ProviderServer&) = delete;
  ProviderServer& operator=(const ProviderServer&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  /// Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Binds and serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

  std::string base_url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace keyweave::providers

// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace keyweave {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-side precondition was violated (empty text, zero dimension, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A provider returned something that breaks its operation contract.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

enum class ProviderErrorKind {
  kTimeout,
  kTransport,
  kStatus,
  kDecode,
  kUnavailable,
};

const char* to_string(ProviderErrorKind kind) noexcept;

/// Failure of an external provider call, after the retry budget was spent.
class ProviderError : public Error {
 public:
  ProviderError(ProviderErrorKind kind, std::string message, std::string payload = {},
                int status = 0)
      : Error(std::move(message)), kind_(kind), payload_(std::move(payload)), status_(status) {}

  ProviderErrorKind kind() const noexcept { return kind_; }
  const std::string& payload() const noexcept { return payload_; }
  int status() const noexcept { return status_; }
  int attempts() const noexcept { return attempts_; }
  void set_attempts(int n) noexcept { attempts_ = n; }

  /// Timeouts, transport failures, 429 and 5xx are worth another attempt.
  bool retryable() const noexcept {
    switch (kind_) {
      case ProviderErrorKind::kTimeout:
      case ProviderErrorKind::kTransport:
        return true;
      case ProviderErrorKind::kStatus:
        return status_ == 429 || status_ >= 500;
      default:
        return false;
    }
  }

 private:
  ProviderErrorKind kind_;
  std::string payload_;
  int status_ = 0;
  int attempts_ = 1;
};

/// Every enhancement attempt returned an unparseable reply.
class EnhancementError : public Error {
 public:
  EnhancementError(std::string message, std::vector<std::string> raw_responses)
      : Error(std::move(message)), raw_responses_(std::move(raw_responses)) {}

  const std::vector<std::string>& raw_responses() const noexcept { return raw_responses_; }

 private:
  std::vector<std::string> raw_responses_;
};

/// A pipeline stage failed; carries the stage name and any provider payload.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause, std::string payload = {})
      : Error(stage + ": " + cause), stage_(std::move(stage)), payload_(std::move(payload)) {}

  const std::string& stage() const noexcept { return stage_; }
  const std::string& payload() const noexcept { return payload_; }

 private:
  std::string stage_;
  std::string payload_;
};

}  // namespace keyweave

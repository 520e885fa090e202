// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace keyweave::diffusion {

/// Per-step retention coefficients alpha_t in (0, 1] and their running
/// products (alpha-bar). Index 0 holds step t = 1.
class NoiseSchedule {
 public:
  /// Throws InvalidArgument if empty or any alpha lies outside (0, 1].
  explicit NoiseSchedule(std::vector<double> alphas);

  std::size_t steps() const noexcept { return alphas_.size(); }
  std::span<const double> alphas() const noexcept { return alphas_; }
  std::span<const double> cumulative() const noexcept { return cumulative_; }

  /// alpha_t for 1-based t.
  double alpha(std::size_t t) const;
  /// alpha-bar_t for 1-based t.
  double alpha_bar(std::size_t t) const;

  friend bool operator==(const NoiseSchedule&, const NoiseSchedule&) = default;

 private:
  std::vector<double> alphas_;
  std::vector<double> cumulative_;
};

struct LatentState {
  std::vector<double> values;
  std::size_t timestep = 0;

  friend bool operator==(const LatentState&, const LatentState&) = default;
};

/// One Markov step: x_t = sqrt(alpha) * x_{t-1} + sqrt(1 - alpha) * noise.
/// The noise is supplied by the caller; nothing here draws random numbers.
LatentState forward_step(const LatentState& previous, double alpha, std::span<const double> noise);

/// Closed-form jump from x_0 to step t (1-based):
/// x_t = sqrt(alpha_bar_t) * x_0 + sqrt(1 - alpha_bar_t) * noise.
LatentState forward_marginal(const LatentState& x0, const NoiseSchedule& schedule, std::size_t t,
                             std::span<const double> noise);

/// alpha_t = 1 - beta_t with beta spaced linearly, endpoints included.
NoiseSchedule make_linear_schedule(double beta_start, double beta_end, std::size_t steps);

inline constexpr double kDefaultBetaStart = 1e-4;
inline constexpr double kDefaultBetaEnd = 0.02;
inline constexpr std::size_t kDefaultSteps = 1000;

inline NoiseSchedule default_schedule() {
  return make_linear_schedule(kDefaultBetaStart, kDefaultBetaEnd, kDefaultSteps);
}

/// Plain text table, one alpha per line, printed with round-trip precision.
void write_schedule(std::ostream& out, const NoiseSchedule& schedule);
/// Reads the table back; blank lines and '#' comments are skipped.
NoiseSchedule read_schedule(std::istream& in);

}  // namespace keyweave::diffusion

// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/diffusion.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "keyweave/error.hpp"
#include "text_util.hpp"

namespace keyweave::diffusion {
namespace {

bool valid_alpha(double a) { return std::isfinite(a) && a > 0.0 && a <= 1.0; }

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidArgument(std::string(what) + " contains a non-finite value");
  }
}

}  // namespace

NoiseSchedule::NoiseSchedule(std::vector<double> alphas) : alphas_(std::move(alphas)) {
  if (alphas_.empty()) throw InvalidArgument("noise schedule needs at least one step");
  cumulative_.reserve(alphas_.size());
  double acc = 1.0;
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    if (!valid_alpha(alphas_[i])) {
      throw InvalidArgument("alpha at step " + std::to_string(i + 1) + " is outside (0, 1]");
    }
    acc *= alphas_[i];
    cumulative_.push_back(acc);
  }
}

double NoiseSchedule::alpha(std::size_t t) const {
  if (t < 1 || t > alphas_.size()) throw InvalidArgument("timestep out of range");
  return alphas_[t - 1];
}

double NoiseSchedule::alpha_bar(std::size_t t) const {
  if (t < 1 || t > cumulative_.size()) throw InvalidArgument("timestep out of range");
  return cumulative_[t - 1];
}

LatentState forward_step(const LatentState& previous, double alpha, std::span<const double> noise) {
  if (!valid_alpha(alpha)) throw InvalidArgument("alpha must lie in (0, 1]");
  if (noise.size() != previous.values.size()) {
    throw DimensionMismatch("noise length " + std::to_string(noise.size()) +
                            " does not match state length " + std::to_string(previous.values.size()));
  }
  check_finite(previous.values, "state");
  check_finite(noise, "noise");
  const double keep = std::sqrt(alpha);
  const double mix = std::sqrt(1.0 - alpha);
  LatentState next;
  next.timestep = previous.timestep + 1;
  next.values.resize(previous.values.size());
  for (std::size_t i = 0; i < noise.size(); ++i) {
    next.values[i] = keep * previous.values[i] + mix * noise[i];
  }
  return next;
}

LatentState forward_marginal(const LatentState& x0, const NoiseSchedule& schedule, std::size_t t,
                             std::span<const double> noise) {
  if (t < 1 || t > schedule.steps()) {
    throw InvalidArgument("timestep " + std::to_string(t) + " outside 1.." +
                          std::to_string(schedule.steps()));
  }
  if (noise.size() != x0.values.size()) throw DimensionMismatch("noise length does not match state length");
  check_finite(x0.values, "state");
  check_finite(noise, "noise");
  const double abar = schedule.alpha_bar(t);
  const double keep = std::sqrt(abar);
  const double mix = std::sqrt(1.0 - abar);
  LatentState out;
  out.timestep = x0.timestep + t;
  out.values.resize(x0.values.size());
  for (std::size_t i = 0; i < noise.size(); ++i) out.values[i] = keep * x0.values[i] + mix * noise[i];
  return out;
}

NoiseSchedule make_linear_schedule(double beta_start, double beta_end, std::size_t steps) {
  if (steps < 1) throw InvalidArgument("schedule needs at least one step");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
    throw InvalidArgument("linear schedule requires 0 < beta_start <= beta_end < 1");
  }
  std::vector<double> alphas(steps);
  if (steps == 1) {
    alphas[0] = 1.0 - beta_start;
  } else {
    const double step = (beta_end - beta_start) / static_cast<double>(steps - 1);
    for (std::size_t i = 0; i < steps; ++i) {
      const double beta = (i + 1 == steps) ? beta_end : beta_start + step * static_cast<double>(i);
      alphas[i] = 1.0 - beta;
    }
  }
  return NoiseSchedule(std::move(alphas));
}

void write_schedule(std::ostream& out, const NoiseSchedule& schedule) {
  for (double a : schedule.alphas()) out << text::format_double(a) << '\n';
}

NoiseSchedule read_schedule(std::istream& in) {
  std::vector<double> alphas;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc{} || ptr != body.data() + body.size()) {
      throw ParseError("schedule line " + std::to_string(lineno) + " is not a number");
    }
    alphas.push_back(v);
  }
  return NoiseSchedule(std::move(alphas));
}

}  // namespace keyweave::diffusion

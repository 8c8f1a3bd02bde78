// Copyright 2026 The qkdkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qkdkit/critique.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "qkdkit/error.hpp"

namespace qkdkit {

std::uint32_t require_key_distribution(std::span<const double> dist, double tol) {
  if (dist.empty() || !std::has_single_bit(dist.size()) || dist.size() > (std::size_t{1} << 16)) {
    throw QkdError(ErrorKind::kBadDistribution,
                   "distribution length " + std::to_string(dist.size()) + " is not 2^l with l <= 16");
  }
  double sum = 0.0;
  for (double p : dist) {
    if (!std::isfinite(p) || p < -tol) throw QkdError(ErrorKind::kBadDistribution, "negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw QkdError(ErrorKind::kBadDistribution, "probabilities sum to " + std::to_string(sum));
  }
  return static_cast<std::uint32_t>(std::countr_zero(dist.size()));
}

bool yuen_check(std::span<const double> dist, double eps, double tol) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw QkdError(ErrorKind::kBadDistribution, "eps outside [0, 1]");
  const std::uint32_t l = require_key_distribution(dist);
  const double u = std::ldexp(1.0, -static_cast<int>(l));
  return std::all_of(dist.begin(), dist.end(), [&](double p) { return std::abs(p - u) <= eps * u + tol; });
}

std::vector<double> yuen_counterexample(std::uint32_t l, double eps) {
  if (l > 16) throw QkdError(ErrorKind::kBadDistribution, "key length above 16");
  if (!(eps >= 0.0 && eps <= 1.0)) throw QkdError(ErrorKind::kBadDistribution, "eps outside [0, 1]");
  const double u = std::ldexp(1.0, -static_cast<int>(l));
  std::vector<double> dist(std::size_t{1} << l, (1.0 - eps) * u);
  dist[0] += eps;
  return dist;
}

double distance_to_uniform(std::span<const double> dist) {
  const std::uint32_t l = require_key_distribution(dist);
  const double u = std::ldexp(1.0, -static_cast<int>(l));
  double s = 0.0;
  for (double p : dist) s += std::abs(p - u);
  return 0.5 * s;
}

double yuen_max_deviation(std::span<const double> dist) {
  const std::uint32_t l = require_key_distribution(dist);
  const double u = std::ldexp(1.0, -static_cast<int>(l));
  double worst = 0.0;
  for (double p : dist) worst = std::max(worst, std::abs(p - u));
  return worst / u;
}

GuessingBound max_guess_bound(std::span<const double> dist, double tol) {
  const std::uint32_t l = require_key_distribution(dist);
  GuessingBound g;
  g.max_probability = *std::max_element(dist.begin(), dist.end());
  g.bound = std::ldexp(1.0, -static_cast<int>(l)) + distance_to_uniform(dist);
  g.holds = g.max_probability <= g.bound + tol;
  return g;
}

}  // namespace qkdkit

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

// Executable versions of the per-key-value secrecy criterion and the
// counterexample and guessing-probability arguments against it.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qkdkit {

/// Checks that dist is a probability vector over {0,1}^l (length a power of
/// two, entries >= -tol, sum 1 within tol) and returns l. Throws
/// kBadDistribution otherwise.
std::uint32_t require_key_distribution(std::span<const double> dist, double tol = 1e-9);

/// True when |P(k) - 2^-l| <= eps 2^-l for every k (with slack tol).
bool yuen_check(std::span<const double> dist, double eps, double tol = 1e-12);

/// P(k) = (1 - eps) 2^-l + eps [k == 0].
std::vector<double> yuen_counterexample(std::uint32_t l, double eps);

/// Half the l1 distance to the uniform distribution.
double distance_to_uniform(std::span<const double> dist);

/// Smallest eps for which yuen_check passes: 2^l max_k |P(k) - 2^-l|.
double yuen_max_deviation(std::span<const double> dist);

struct GuessingBound {
  double max_probability = 0.0;  // max_k P(k)
  double bound = 0.0;            // 2^-l + distance_to_uniform
  bool holds = true;
};

GuessingBound max_guess_bound(std::span<const double> dist, double tol = 1e-12);

}  // namespace qkdkit

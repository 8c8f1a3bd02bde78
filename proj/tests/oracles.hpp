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

// Reference computations used by the tests. None of them call the library
// routine they are compared against.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "qkdkit/protocol.hpp"
#include "qkdkit/statekit.hpp"

namespace oracle {

using qkdkit::Complex;
using qkdkit::Matrix;

/// Eigenvalues of a Hermitian matrix of size <= 3 from its characteristic
/// polynomial, ascending.
inline std::vector<double> char_poly_eigenvalues(const Matrix& h) {
  const auto n = h.rows();
  if (n == 1) return {h(0, 0).real()};
  if (n == 2) {
    const double a = h(0, 0).real(), d = h(1, 1).real();
    const double b2 = std::norm(h(0, 1));
    const double mean = 0.5 * (a + d), rad = std::sqrt(0.25 * (a - d) * (a - d) + b2);
    return {mean - rad, mean + rad};
  }
  // det(lambda I - H) = lambda^3 - c2 lambda^2 + c1 lambda - c0.
  const double c2 = (h(0, 0) + h(1, 1) + h(2, 2)).real();
  const double c1 = (h(0, 0) * h(1, 1) + h(0, 0) * h(2, 2) + h(1, 1) * h(2, 2) - h(0, 1) * h(1, 0) -
                     h(0, 2) * h(2, 0) - h(1, 2) * h(2, 1))
                        .real();
  const Complex det = h(0, 0) * (h(1, 1) * h(2, 2) - h(1, 2) * h(2, 1)) -
                      h(0, 1) * (h(1, 0) * h(2, 2) - h(1, 2) * h(2, 0)) +
                      h(0, 2) * (h(1, 0) * h(2, 1) - h(1, 1) * h(2, 0));
  const double c0 = det.real();
  // Depressed cubic t^3 + p t + q with lambda = t + c2 / 3.
  const double shift = c2 / 3.0;
  const double p = c1 - c2 * c2 / 3.0;
  const double q = -2.0 * c2 * c2 * c2 / 27.0 + c2 * c1 / 3.0 - c0;
  std::vector<double> roots;
  if (std::abs(p) < 1e-300) {
    roots = {shift + std::cbrt(-q), shift + std::cbrt(-q), shift + std::cbrt(-q)};
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) roots.push_back(shift + m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// 1 - min_k p_k / q_k over the support of q, clamped to [0, 1].
inline double diagonal_delta_tilde(const std::vector<double>& p, const std::vector<double>& q) {
  double ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (q[k] > 0.0) ratio = std::min(ratio, p[k] / q[k]);
  }
  return std::clamp(1.0 - ratio, 0.0, 1.0);
}

/// Classical model of the fixed-basis intercept-resend attack with Bob
/// measuring in Alice's basis and no reconciliation. Eve's view is her own
/// outcomes plus the announced bases and test bits.
struct GuessEnumeration {
  double value = 0.0;          // sum over basis patterns of weight * distance
  double accept = 0.0;         // Pr[Omega]
  double lucky_weight = 0.0;   // Pr[bases == guesses, accepted]
  double lucky_distance = 0.0; // conditional distance on that pattern
  double lucky_term = 0.0;
};

inline GuessEnumeration enumerate_basis_guess(std::uint32_t n, const std::string& guesses,
                                              const std::vector<bool>& is_test, double threshold,
                                              std::uint32_t key_length, std::uint64_t hash_seed) {
  GuessEnumeration out;
  std::uint32_t raw_len = 0;
  for (std::uint32_t i = 0; i < n; ++i) raw_len += is_test[i] ? 0 : 1;
  const bool produces = raw_len >= key_length && key_length > 0;
  // Hash applied by hand from the public matrix entries.
  const auto h = qkdkit::ToeplitzHash::seeded(hash_seed, key_length, raw_len);
  auto hash = [&](std::uint32_t raw) {
    std::uint32_t k = 0;
    for (std::uint32_t i = 0; i < key_length; ++i) {
      int bit = 0;
      for (std::uint32_t j = 0; j < raw_len; ++j) bit ^= h.at(i, j) & ((raw >> (raw_len - 1 - j)) & 1);
      k = (k << 1) | bit;
    }
    return k;
  };
  const double keys = std::ldexp(1.0, key_length);

  for (std::uint32_t alpha = 0; alpha < (1u << n); ++alpha) {
    // p(kA, view) for this basis pattern; view = (eve outcomes, test bits).
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::map<std::uint32_t, double>> joint;
    double weight = 0.0;
    // Per round choices: x, Eve's outcome e, Bob's outcome y.
    for (std::uint32_t choice = 0; choice < (1u << (3 * n)); ++choice) {
      double prob = std::ldexp(1.0, -static_cast<int>(n));  // basis pattern
      std::uint32_t raw = 0, eve = 0, tests = 0;
      int trials = 0, errors = 0;
      for (std::uint32_t i = 0; i < n && prob > 0.0; ++i) {
        const int a = (alpha >> i) & 1;  // 1 = X
        const int x = (choice >> (3 * i)) & 1, e = (choice >> (3 * i + 1)) & 1, y = (choice >> (3 * i + 2)) & 1;
        const int g = guesses[i] == 'X' ? 1 : 0;
        prob *= 0.5;                            // x
        prob *= g == a ? (e == x ? 1.0 : 0.0)   // Eve reads the bit
                       : 0.5;                   // Eve's outcome is random
        prob *= g == a ? (y == e ? 1.0 : 0.0)   // Bob gets Eve's resend
                       : 0.5;                   // wrong basis for Bob
        eve = (eve << 1) | e;
        if (is_test[i]) {
          ++trials;
          errors += x != y;
          tests = (tests << 2) | (x << 1) | y;
        } else {
          raw = (raw << 1) | x;
        }
      }
      if (prob == 0.0) continue;
      const double qber = trials == 0 ? 0.0 : double(errors) / trials;
      if (qber > threshold || !produces) continue;
      joint[{eve, tests}][hash(raw)] += prob;
      weight += prob;
    }
    double distance = 0.0;
    for (const auto& [view, dist] : joint) {
      double pv = 0.0;
      for (const auto& [k, p] : dist) pv += p;
      double d = (keys - dist.size()) * pv / keys;
      for (const auto& [k, p] : dist) d += std::abs(p - pv / keys);
      distance += d;
    }
    // distance is already weighted; split it into weight * conditional.
    out.value += distance;
    out.accept += weight;
    std::uint32_t lucky = 0;
    for (std::uint32_t i = 0; i < n; ++i) lucky |= (guesses[i] == 'X' ? 1u : 0u) << i;
    if (alpha == lucky && weight > 0.0) {
      out.lucky_weight = weight;
      out.lucky_distance = distance / weight;
      out.lucky_term = distance;
    }
  }
  return out;
}

}  // namespace oracle

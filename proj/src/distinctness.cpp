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

#include "qkdkit/distinctness.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "qkdkit/random.hpp"

namespace qkdkit {
namespace {

// Roundoff allowance for the PSD test in delta_tilde. Density operators have
// operator norm <= 1, so the residual of an eigensolve is O(dim * eps).
double feasibility_slack(Eigen::Index dim) {
  return 64.0 * DBL_EPSILON * static_cast<double>(std::max<Eigen::Index>(dim, 1));
}

DensityOperator mix(const DensityOperator& a, const DensityOperator& b, double t) {
  return DensityOperator::validate((1.0 - t) * a.matrix() + t * b.matrix());
}

}  // namespace

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho.dim(), sigma.dim(), "trace_distance");
  return 0.5 * hermitian_trace_norm(rho.matrix() - sigma.matrix());
}

bool mixture_feasible(const DensityOperator& rho, const DensityOperator& sigma, double eps) {
  require_same_dim(rho.dim(), sigma.dim(), "mixture_feasible");
  Matrix diff = rho.matrix() - (1.0 - eps) * sigma.matrix();
  diff = 0.5 * (diff + diff.adjoint()).eval();
  return minimum_eigenvalue(diff) >= -feasibility_slack(rho.dim());
}

double delta_tilde(const DensityOperator& rho, const DensityOperator& sigma,
                   const BisectionOptions& opts) {
  require_same_dim(rho.dim(), sigma.dim(), "delta_tilde");
  if (mixture_feasible(rho, sigma, 0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < opts.max_iterations && hi - lo > opts.tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mixture_feasible(rho, sigma, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double delta_hat(const DensityOperator& rho, const DensityOperator& sigma,
                 const BisectionOptions& opts) {
  return std::min(delta_tilde(rho, sigma, opts), delta_tilde(sigma, rho, opts));
}

MidpointState midpoint_state(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho.dim(), sigma.dim(), "midpoint_state");
  const JordanParts parts = jordan_decompose(rho.op() - sigma.op());
  const double pos = parts.positive.trace();
  const double neg = -parts.negative.trace();
  const double td = 0.5 * (pos + neg);

  MidpointState out{
      DensityOperator::validate((sigma.matrix() + parts.positive.matrix()) / (1.0 + td)),
      td / (1.0 + td), td, std::nullopt, std::nullopt};
  if (pos > 0.0 && neg > 0.0) {
    out.rho_residue = DensityOperator::validate(-parts.negative.matrix() / neg);
    out.sigma_residue = DensityOperator::validate(parts.positive.matrix() / pos);
  }
  return out;
}

double path_cost(std::span<const DensityOperator> states, const BisectionOptions& opts) {
  if (states.size() < 2) {
    throw QkdError(ErrorKind::kEmptyPath, "a path needs at least two states");
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    total += delta_hat(states[i], states[i + 1], opts);
  }
  return total;
}

DistinctnessBounds p_neq_max_bounds(const DensityOperator& rho, const DensityOperator& sigma,
                                    const RefineOptions& opts) {
  require_same_dim(rho.dim(), sigma.dim(), "p_neq_max_bounds");
  DistinctnessBounds out;
  out.lower = trace_distance(rho, sigma);

  auto dhat = [&](const DensityOperator& a, const DensityOperator& b) {
    ++out.evaluations;
    return delta_hat(a, b, opts.bisection);
  };
  // Edge costs of a path, one per consecutive pair.
  auto edges_of = [&](const std::vector<DensityOperator>& path) {
    std::vector<double> edges;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) edges.push_back(dhat(path[i], path[i + 1]));
    return edges;
  };
  auto sum = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  };

  out.witness_path = {rho, sigma};
  out.upper = dhat(rho, sigma);
  if (out.upper == 0.0) return out;

  auto consider = [&](std::vector<DensityOperator> path, double cost) {
    if (cost < out.upper) {
      out.upper = cost;
      out.witness_path = std::move(path);
    }
  };

  // Midpoint path.
  const MidpointState mid = midpoint_state(rho, sigma);
  std::vector<DensityOperator> current{rho, mid.omega, sigma};
  std::vector<double> current_edges = edges_of(current);
  double current_cost = sum(current_edges);
  consider(current, current_cost);

  // Evenly spaced points on the segment from rho to sigma.
  for (int k = 1; k <= 3; ++k) {
    std::vector<DensityOperator> path{rho};
    for (int j = 1; j <= k; ++j) path.push_back(mix(rho, sigma, double(j) / double(k + 1)));
    path.push_back(sigma);
    const std::vector<double> edges = edges_of(path);
    const double cost = sum(edges);
    consider(path, cost);
    if (cost < current_cost) {
      current = path;
      current_edges = edges;
      current_cost = cost;
    }
  }

  // Coordinate descent: nudge one intermediate toward a random state and
  // keep the move if the two affected edges get cheaper.
  Rng rng(opts.seed);
  std::size_t spent = 0;
  double step = 0.5;
  while (spent + 2 <= opts.budget) {
    const std::size_t i = uniform_index(rng, 1, current.size() - 2);
    const DensityOperator target = random_density(rho.dim(), rng);
    const double t = step * uniform_unit(rng);
    const DensityOperator moved = mix(current[i], target, t);
    const double left = dhat(current[i - 1], moved);
    const double right = dhat(moved, current[i + 1]);
    spent += 2;
    const double delta = left + right - current_edges[i - 1] - current_edges[i];
    if (delta < 0.0) {
      current[i] = moved;
      current_edges[i - 1] = left;
      current_edges[i] = right;
      current_cost = sum(current_edges);
      consider(current, current_cost);
    } else {
      step = std::max(step * 0.9, 1e-3);
    }
  }
  return out;
}

}  // namespace qkdkit

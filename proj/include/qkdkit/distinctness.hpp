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

// Distinctness measures between density operators: the trace distance, the
// one-sided mixture pre-distance and its symmetrization, and certified
// two-sided bounds on the maximum distinctness probability, defined as the
// infimum over state paths rho = w_0, ..., w_n = sigma of
// sum_i delta_hat(w_i, w_{i+1}).

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkdkit/statekit.hpp"

namespace qkdkit {

/// Half the Schatten 1-norm of rho - sigma.
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

struct BisectionOptions {
  double tol = 1e-9;
  int max_iterations = 60;
};

/// True when rho - (1 - eps) sigma is PSD up to a roundoff slack that scales
/// with machine epsilon and the dimension.
bool mixture_feasible(const DensityOperator& rho, const DensityOperator& sigma, double eps);

/// Smallest eps in [0, 1] with rho = (1 - eps) sigma + eps sigma' for some
/// state sigma'. Found by bisection on the PSD test above; the result
/// over-approximates the infimum by at most opts.tol. Returns exactly 1 when
/// no eps < 1 is feasible.
double delta_tilde(const DensityOperator& rho, const DensityOperator& sigma,
                   const BisectionOptions& opts = {});

/// min(delta_tilde(rho, sigma), delta_tilde(sigma, rho)).
double delta_hat(const DensityOperator& rho, const DensityOperator& sigma,
                 const BisectionOptions& opts = {});

struct MidpointState {
  DensityOperator omega;
  double eps_prime = 0.0;        // TD / (1 + TD)
  double trace_distance = 0.0;   // TD
  // -(rho - sigma)_- / TD and (rho - sigma)_+ / TD; absent when rho == sigma.
  std::optional<DensityOperator> rho_residue;
  std::optional<DensityOperator> sigma_residue;
};

/// The state omega = (sigma + (rho - sigma)_+) / (1 + TD), which is an
/// eps'-mixture away from both rho and sigma.
MidpointState midpoint_state(const DensityOperator& rho, const DensityOperator& sigma);

/// Sum of delta_hat over consecutive states. Needs at least two states.
double path_cost(std::span<const DensityOperator> states, const BisectionOptions& opts = {});

struct DistinctnessBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<DensityOperator> witness_path;
  std::size_t evaluations = 0;  // delta_hat evaluations, baseline included
};

struct RefineOptions {
  std::size_t budget = 64;  // delta_hat evaluations spent on local search
  std::uint64_t seed = 20240611;
  BisectionOptions bisection{};
};

/// lower is the trace distance; upper is the cheapest path found among the
/// direct path, the midpoint path, convex-segment paths and a seeded
/// coordinate-descent refinement. lower <= P_max <= upper; upper is never
/// claimed to be tight.
DistinctnessBounds p_neq_max_bounds(const DensityOperator& rho, const DensityOperator& sigma,
                                    const RefineOptions& opts = {});

// ---------------------------------------------------------------------------
// Axiom conformance

using MetricFunctional = std::function<double(const DensityOperator&, const DensityOperator&)>;

struct ConformanceOptions {
  std::size_t pairs = 1000;
  std::size_t triples = 1000;
  std::vector<Eigen::Index> dims{2, 3, 4};
  std::uint64_t seed = 20240611;
  double tol = 1e-9;
};

struct AxiomResult {
  std::string name;  // A1, A2, A3, P1, P2
  std::string description;
  bool passed = true;
  double worst_violation = 0.0;  // <= tol means pass
  std::size_t samples = 0;
  // States realizing the worst violation (empty when nothing was violated).
  std::vector<DensityOperator> witness;
  std::string witness_note;
};

struct ConformanceReport {
  std::vector<AxiomResult> results;
  double tol = 0.0;
  std::uint64_t seed = 0;

  bool all_passed() const;
  const AxiomResult& at(const std::string& name) const;
};

/// Probes a candidate distinctness functional on seeded random states:
///  A1 triangle inequality on triples, A2 symmetry on pairs, A3 the mixture
///  bound f((1-e) s + e s', s) <= e on constructed mixtures, P1 positive
///  definiteness on identical and distinct pairs, P2 data processing under
///  random Kraus channels.
ConformanceReport conformance_check(const MetricFunctional& f, const ConformanceOptions& opts = {});

}  // namespace qkdkit

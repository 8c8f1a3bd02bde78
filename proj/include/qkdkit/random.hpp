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

// Seeded random ensembles used by the conformance harness, the path search and
// the test suites.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qkdkit/statekit.hpp"

namespace qkdkit {

using Rng = std::mt19937_64;

Matrix ginibre_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// G G^dagger / tr(G G^dagger) with G a dim x rank Ginibre matrix.
DensityOperator random_density(Eigen::Index dim, Rng& rng);
DensityOperator random_density(Eigen::Index dim, Eigen::Index rank, Rng& rng);
DensityOperator random_pure_state(Eigen::Index dim, Rng& rng);
DensityOperator random_diagonal_density(Eigen::Index dim, Rng& rng);

Matrix haar_unitary(Eigen::Index dim, Rng& rng);

/// Kraus operators cut from a Haar-random isometry dim_in -> dim_out * n_kraus.
KrausChannel random_channel(Eigen::Index dim_in, Eigen::Index dim_out, Eigen::Index n_kraus, Rng& rng);

/// U diag(u) U^dagger with u uniform on [0, 1].
HermitianOperator random_effect(Eigen::Index dim, Rng& rng);

std::vector<double> random_probability_vector(std::size_t n, Rng& rng);

/// Uniform integer in [lo, hi] that does not depend on the standard
/// library's distribution implementation.
std::uint64_t uniform_index(Rng& rng, std::uint64_t lo, std::uint64_t hi);
double uniform_unit(Rng& rng);

}  // namespace qkdkit

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

#include "qkdkit/random.hpp"

#include <cmath>

namespace qkdkit {

double uniform_unit(Rng& rng) {
  // 53 random mantissa bits.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return rng();
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return lo + v % span;
}

namespace {

// Box-Muller on uniform_unit, so ensembles are reproducible across standard
// libraries.
double standard_normal(Rng& rng) {
  double u1;
  do {
    u1 = uniform_unit(rng);
  } while (u1 <= 0.0);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

Matrix ginibre_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = standard_normal(rng);
      const double im = standard_normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

DensityOperator random_density(Eigen::Index dim, Eigen::Index rank, Rng& rng) {
  const Matrix g = ginibre_matrix(dim, rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator::validate(rho);
}

DensityOperator random_density(Eigen::Index dim, Rng& rng) { return random_density(dim, dim, rng); }

DensityOperator random_pure_state(Eigen::Index dim, Rng& rng) {
  const Matrix g = ginibre_matrix(dim, 1, rng);
  return DensityOperator::pure(g.col(0));
}

DensityOperator random_diagonal_density(Eigen::Index dim, Rng& rng) {
  const auto p = random_probability_vector(static_cast<std::size_t>(dim), rng);
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) m(i, i) = p[static_cast<std::size_t>(i)];
  return DensityOperator::validate(m);
}

Matrix haar_unitary(Eigen::Index dim, Rng& rng) {
  const Matrix g = ginibre_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    const double a = std::abs(d);
    if (a > 0.0) q.col(i) *= d / a;
  }
  return q;
}

KrausChannel random_channel(Eigen::Index dim_in, Eigen::Index dim_out, Eigen::Index n_kraus, Rng& rng) {
  const Eigen::Index tall = dim_out * n_kraus;
  if (tall < dim_in) {
    throw QkdError(ErrorKind::kBadConfig, "too few Kraus operators for an isometry");
  }
  const Matrix g = ginibre_matrix(tall, dim_in, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix v = qr.householderQ() * Matrix::Identity(tall, dim_in);
  std::vector<Matrix> ops;
  ops.reserve(static_cast<std::size_t>(n_kraus));
  for (Eigen::Index k = 0; k < n_kraus; ++k) ops.push_back(v.block(k * dim_out, 0, dim_out, dim_in));
  return KrausChannel(std::move(ops), ChannelMode::kTracePreserving);
}

HermitianOperator random_effect(Eigen::Index dim, Rng& rng) {
  const Matrix u = haar_unitary(dim, rng);
  RealVector d(dim);
  for (Eigen::Index i = 0; i < dim; ++i) d(i) = uniform_unit(rng);
  return HermitianOperator::symmetrized(u * d.cast<Complex>().asDiagonal() * u.adjoint());
}

std::vector<double> random_probability_vector(std::size_t n, Rng& rng) {
  // Exponential weights give the uniform (flat Dirichlet) distribution.
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& x : p) {
    double u;
    do {
      u = uniform_unit(rng);
    } while (u <= 0.0);
    x = -std::log(u);
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

}  // namespace qkdkit

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

// Dense Hermitian operators, density operators, channels and measurements.
//
// Every operator is symmetrized to (M + M^dagger)/2 on construction and all
// spectral work is done on the symmetrized form.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qkdkit/error.hpp"

namespace qkdkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

struct Tolerances {
  double hermitian = 1e-9;
  double trace = 1e-9;
  // Relative: an eigenvalue counts as negative below -psd * (1 + ||M||_1).
  double psd = 1e-9;
  double cptp = 1e-9;
  std::size_t max_dim = 4096;

  double psd_threshold(double trace_norm) const { return psd * (1.0 + trace_norm); }

  /// Defaults, with the dimension ceiling taken from QKDKIT_MAX_DIM if set.
  static Tolerances from_environment();
};

const Tolerances& default_tolerances();

class HermitianOperator {
 public:
  HermitianOperator() = default;
  /// Rejects matrices that are not square or whose asymmetry exceeds
  /// tol.hermitian (max-abs entry of M - M^dagger).
  explicit HermitianOperator(const Matrix& m, const Tolerances& tol = default_tolerances());

  /// Symmetrizes without checking; for operators that are Hermitian by
  /// construction.
  static HermitianOperator symmetrized(const Matrix& m);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;

 private:
  Matrix m_;
};

struct Spectrum {
  RealVector values;  // ascending
  Matrix vectors;     // columns
};

Spectrum eigh(const HermitianOperator& h);
Spectrum eigh(const Matrix& hermitian);

class DensityOperator {
 public:
  DensityOperator() = default;

  /// Validates a unit-trace PSD matrix. Eigenvalues in [-tol_psd, 0) are
  /// clipped to zero and the result renormalized to unit trace.
  static DensityOperator validate(const Matrix& m, const Tolerances& tol = default_tolerances());

  static DensityOperator maximally_mixed(Eigen::Index dim);
  static DensityOperator basis_state(Eigen::Index dim, Eigen::Index index);
  static DensityOperator pure(const Eigen::VectorXcd& psi);

  Eigen::Index dim() const { return op_.dim(); }
  const HermitianOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }

 private:
  explicit DensityOperator(HermitianOperator op) : op_(std::move(op)) {}
  HermitianOperator op_;
};

class SubnormalizedOperator {
 public:
  SubnormalizedOperator() = default;

  /// PSD within tolerance and 0 <= trace <= 1 + tol.trace. Negative
  /// eigenvalues within tolerance are clipped; the trace is not rescaled.
  static SubnormalizedOperator validate(const Matrix& m, const Tolerances& tol = default_tolerances());

  Eigen::Index dim() const { return op_.dim(); }
  const HermitianOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  double weight() const { return op_.trace(); }

 private:
  explicit SubnormalizedOperator(HermitianOperator op) : op_(std::move(op)) {}
  HermitianOperator op_;
};

enum class ChannelMode { kTracePreserving, kTraceNonIncreasing };

class KrausChannel {
 public:
  KrausChannel(std::vector<Matrix> kraus_ops, ChannelMode mode,
               const Tolerances& tol = default_tolerances());

  static KrausChannel identity(Eigen::Index dim);

  const std::vector<Matrix>& kraus_ops() const { return ops_; }
  ChannelMode mode() const { return mode_; }
  Eigen::Index dim_in() const { return ops_.front().cols(); }
  Eigen::Index dim_out() const { return ops_.front().rows(); }

 private:
  std::vector<Matrix> ops_;
  ChannelMode mode_;
};

class Povm {
 public:
  explicit Povm(std::vector<HermitianOperator> elements, const Tolerances& tol = default_tolerances());

  const std::vector<HermitianOperator>& elements() const { return elements_; }

 private:
  std::vector<HermitianOperator> elements_;
};

/// Sum of absolute eigenvalues.
double schatten_1_norm(const HermitianOperator& h);
/// Same, for a matrix already known to be Hermitian. 1x1 and diagonal inputs
/// skip the eigensolver.
double hermitian_trace_norm(const Matrix& hermitian);

double minimum_eigenvalue(const Matrix& hermitian);

struct JordanParts {
  HermitianOperator positive;  // >= 0
  HermitianOperator negative;  // <= 0
};

JordanParts jordan_decompose(const HermitianOperator& delta);

Matrix kron(const Matrix& a, const Matrix& b);

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b,
                       const Tolerances& tol = default_tolerances());

/// Factors are ordered most-significant first, matching kron(a, b).
Matrix partial_trace(const Matrix& m, std::span<const std::size_t> dims,
                     std::span<const std::size_t> keep);
DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> dims,
                              std::span<const std::size_t> keep);

Matrix apply_kraus(std::span<const Matrix> kraus_ops, const Matrix& rho);
/// Requires a trace-preserving channel.
DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho);
SubnormalizedOperator apply_channel(const KrausChannel& ch, const SubnormalizedOperator& rho);

std::vector<double> measure(const Povm& povm, const DensityOperator& rho);

struct HelstromMeasurement {
  HermitianOperator projector;  // onto the support of (rho - sigma)_+
  double advantage;             // tr[projector (rho - sigma)]
};

HelstromMeasurement helstrom(const DensityOperator& rho, const DensityOperator& sigma);

/// Throws kBadEffect unless 0 <= effect <= 1 within tolerance.
void require_effect(const HermitianOperator& effect, const Tolerances& tol = default_tolerances());

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what);

}  // namespace qkdkit

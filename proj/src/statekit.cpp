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

#include "qkdkit/statekit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>

namespace qkdkit {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kNotHermitian: return "NotHermitian";
    case ErrorKind::kNotPsd: return "NotPSD";
    case ErrorKind::kBadTrace: return "BadTrace";
    case ErrorKind::kNotCptp: return "NotCPTP";
    case ErrorKind::kBadEffect: return "BadEffect";
    case ErrorKind::kBadDistribution: return "BadDistribution";
    case ErrorKind::kInvalidState: return "InvalidState";
    case ErrorKind::kUnsupportedLengths: return "UnsupportedLengths";
    case ErrorKind::kEmptyPath: return "EmptyPath";
    case ErrorKind::kBadConfig: return "BadConfig";
    case ErrorKind::kDimMismatch: return "DimMismatch";
    case ErrorKind::kDimensionOverflow: return "DimensionOverflow";
    case ErrorKind::kEigensolverFailure: return "EigensolverFailure";
  }
  return "UnknownError";
}

ErrorFamily family_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse:
      return ErrorFamily::kParse;
    case ErrorKind::kDimMismatch:
    case ErrorKind::kDimensionOverflow:
      return ErrorFamily::kDimension;
    case ErrorKind::kEigensolverFailure:
      return ErrorFamily::kNumerical;
    default:
      return ErrorFamily::kValidation;
  }
}

Tolerances Tolerances::from_environment() {
  Tolerances tol;
  if (const char* env = std::getenv("QKDKIT_MAX_DIM")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) {
      throw QkdError(ErrorKind::kParse, std::string("QKDKIT_MAX_DIM is not a positive integer: ") + env);
    }
    tol.max_dim = static_cast<std::size_t>(v);
  }
  return tol;
}

const Tolerances& default_tolerances() {
  static const Tolerances tol;
  return tol;
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw QkdError(ErrorKind::kDimMismatch,
                   std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

namespace {

void require_dim_within(Eigen::Index dim, const Tolerances& tol) {
  if (static_cast<std::size_t>(dim) > tol.max_dim) {
    throw QkdError(ErrorKind::kDimensionOverflow,
                   "dimension " + std::to_string(dim) + " exceeds ceiling " + std::to_string(tol.max_dim));
  }
}

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

// Rebuilds V diag(lambda) V^dagger with clipped eigenvalues.
Matrix clip_negative(const Spectrum& s) {
  RealVector clipped = s.values.cwiseMax(0.0);
  return s.vectors * clipped.cast<Complex>().asDiagonal() * s.vectors.adjoint();
}

// Shared PSD validation. Returns the clipped matrix when any eigenvalue was
// slightly negative, nothing otherwise.
std::optional<Matrix> validate_psd(const HermitianOperator& h, const Tolerances& tol) {
  const Spectrum s = eigh(h);
  const double norm = s.values.cwiseAbs().sum();
  const double threshold = tol.psd_threshold(norm);
  const double lo = s.values.size() ? s.values.minCoeff() : 0.0;
  if (lo < -threshold) {
    throw QkdError(ErrorKind::kNotPsd, "minimum eigenvalue " + std::to_string(lo));
  }
  if (lo < 0.0) return clip_negative(s);
  return std::nullopt;
}

}  // namespace

HermitianOperator::HermitianOperator(const Matrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw QkdError(ErrorKind::kDimMismatch, "operator must be a non-empty square matrix");
  }
  require_dim_within(m.rows(), tol);
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol.hermitian) {
    throw QkdError(ErrorKind::kNotHermitian, "asymmetry " + std::to_string(asym));
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::symmetrized(const Matrix& m) {
  HermitianOperator h;
  h.m_ = 0.5 * (m + m.adjoint());
  return h;
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  require_same_dim(dim(), o.dim(), "operator sum");
  return symmetrized(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  require_same_dim(dim(), o.dim(), "operator difference");
  return symmetrized(m_ - o.m_);
}

HermitianOperator HermitianOperator::operator*(double s) const { return symmetrized(s * m_); }

Spectrum eigh(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    throw QkdError(ErrorKind::kEigensolverFailure, "self-adjoint eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Spectrum eigh(const HermitianOperator& h) { return eigh(h.matrix()); }

DensityOperator DensityOperator::validate(const Matrix& m, const Tolerances& tol) {
  HermitianOperator h(m, tol);
  const double tr = h.trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    throw QkdError(ErrorKind::kBadTrace, "trace " + std::to_string(tr));
  }
  if (auto clipped = validate_psd(h, tol)) {
    *clipped /= clipped->trace().real();
    return DensityOperator(HermitianOperator::symmetrized(*clipped));
  }
  return DensityOperator(std::move(h));
}

DensityOperator DensityOperator::maximally_mixed(Eigen::Index dim) {
  return DensityOperator(HermitianOperator::symmetrized(Matrix::Identity(dim, dim) / double(dim)));
}

DensityOperator DensityOperator::basis_state(Eigen::Index dim, Eigen::Index index) {
  Matrix m = Matrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityOperator(HermitianOperator::symmetrized(m));
}

DensityOperator DensityOperator::pure(const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd v = psi / psi.norm();
  return DensityOperator(HermitianOperator::symmetrized(v * v.adjoint()));
}

SubnormalizedOperator SubnormalizedOperator::validate(const Matrix& m, const Tolerances& tol) {
  HermitianOperator h(m, tol);
  Matrix psd = h.matrix();
  if (auto clipped = validate_psd(h, tol)) {
    const double before = psd.trace().real(), after = clipped->trace().real();
    psd = after > 0.0 ? Matrix(*clipped * (before / after)) : *clipped;
  }
  const double tr = psd.trace().real();
  if (tr > 1.0 + tol.trace || tr < -tol.trace) {
    throw QkdError(ErrorKind::kBadTrace, "subnormalized trace " + std::to_string(tr));
  }
  return SubnormalizedOperator(HermitianOperator::symmetrized(psd));
}

KrausChannel::KrausChannel(std::vector<Matrix> kraus_ops, ChannelMode mode, const Tolerances& tol)
    : ops_(std::move(kraus_ops)), mode_(mode) {
  if (ops_.empty()) throw QkdError(ErrorKind::kNotCptp, "channel needs at least one Kraus operator");
  const Eigen::Index din = ops_.front().cols();
  const Eigen::Index dout = ops_.front().rows();
  require_dim_within(std::max(din, dout), tol);
  Matrix sum = Matrix::Zero(din, din);
  for (const Matrix& k : ops_) {
    if (k.cols() != din || k.rows() != dout) {
      throw QkdError(ErrorKind::kDimMismatch, "Kraus operators have inconsistent shapes");
    }
    sum += k.adjoint() * k;
  }
  const Matrix gap = Matrix::Identity(din, din) - sum;
  if (mode_ == ChannelMode::kTracePreserving) {
    if (gap.cwiseAbs().maxCoeff() > tol.cptp) {
      throw QkdError(ErrorKind::kNotCptp, "sum of K^dagger K deviates from identity");
    }
  } else if (minimum_eigenvalue(0.5 * (gap + gap.adjoint())) < -tol.cptp) {
    throw QkdError(ErrorKind::kNotCptp, "sum of K^dagger K exceeds identity");
  }
}

KrausChannel KrausChannel::identity(Eigen::Index dim) {
  return KrausChannel({Matrix::Identity(dim, dim)}, ChannelMode::kTracePreserving);
}

Povm::Povm(std::vector<HermitianOperator> elements, const Tolerances& tol)
    : elements_(std::move(elements)) {
  if (elements_.empty()) throw QkdError(ErrorKind::kBadEffect, "empty POVM");
  const Eigen::Index d = elements_.front().dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& e : elements_) {
    require_same_dim(e.dim(), d, "POVM element");
    const Spectrum s = eigh(e);
    if (s.values.minCoeff() < -tol.psd_threshold(s.values.cwiseAbs().sum())) {
      throw QkdError(ErrorKind::kBadEffect, "POVM element is not PSD");
    }
    sum += e.matrix();
  }
  if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol.cptp) {
    throw QkdError(ErrorKind::kBadEffect, "POVM elements do not sum to identity");
  }
}

double hermitian_trace_norm(const Matrix& h) {
  if (h.rows() == 1) return std::abs(h(0, 0).real());
  if (is_diagonal(h)) return h.diagonal().real().cwiseAbs().sum();
  return eigh(h).values.cwiseAbs().sum();
}

double schatten_1_norm(const HermitianOperator& h) { return hermitian_trace_norm(h.matrix()); }

double minimum_eigenvalue(const Matrix& h) {
  if (h.rows() == 1) return h(0, 0).real();
  if (is_diagonal(h)) return h.diagonal().real().minCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw QkdError(ErrorKind::kEigensolverFailure, "self-adjoint eigensolver did not converge");
  }
  return solver.eigenvalues().minCoeff();
}

JordanParts jordan_decompose(const HermitianOperator& delta) {
  const Spectrum s = eigh(delta);
  const RealVector pos = s.values.cwiseMax(0.0);
  const RealVector neg = s.values.cwiseMin(0.0);
  const Matrix p = s.vectors * pos.cast<Complex>().asDiagonal() * s.vectors.adjoint();
  const Matrix n = s.vectors * neg.cast<Complex>().asDiagonal() * s.vectors.adjoint();
  return {HermitianOperator::symmetrized(p), HermitianOperator::symmetrized(n)};
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b, const Tolerances& tol) {
  const auto d = static_cast<std::size_t>(a.dim()) * static_cast<std::size_t>(b.dim());
  if (d > tol.max_dim) {
    throw QkdError(ErrorKind::kDimensionOverflow,
                   "tensor dimension " + std::to_string(d) + " exceeds ceiling " + std::to_string(tol.max_dim));
  }
  return DensityOperator::validate(kron(a.matrix(), b.matrix()), tol);
}

Matrix partial_trace(const Matrix& m, std::span<const std::size_t> dims,
                     std::span<const std::size_t> keep) {
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (total != static_cast<std::size_t>(m.rows()) || m.rows() != m.cols()) {
    throw QkdError(ErrorKind::kDimMismatch, "factor dimensions do not multiply to operator dimension");
  }
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t k : keep) {
    if (k >= dims.size()) throw QkdError(ErrorKind::kDimMismatch, "kept factor index out of range");
    kept[k] = true;
  }
  // Split every full index into (kept index, traced index).
  std::vector<std::size_t> kept_idx(total), traced_idx(total);
  std::size_t kept_dim = 1;
  for (std::size_t f = 0; f < dims.size(); ++f) {
    if (kept[f]) kept_dim *= dims[f];
  }
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i, kmul = 1, tmul = 1, ki = 0, ti = 0;
    for (std::size_t f = dims.size(); f-- > 0;) {
      const std::size_t digit = rem % dims[f];
      rem /= dims[f];
      if (kept[f]) {
        ki += digit * kmul;
        kmul *= dims[f];
      } else {
        ti += digit * tmul;
        tmul *= dims[f];
      }
    }
    kept_idx[i] = ki;
    traced_idx[i] = ti;
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(kept_dim), static_cast<Eigen::Index>(kept_dim));
  for (std::size_t j = 0; j < total; ++j) {
    for (std::size_t i = 0; i < total; ++i) {
      if (traced_idx[i] == traced_idx[j]) {
        out(static_cast<Eigen::Index>(kept_idx[i]), static_cast<Eigen::Index>(kept_idx[j])) +=
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> dims,
                              std::span<const std::size_t> keep) {
  return DensityOperator::validate(partial_trace(rho.matrix(), dims, keep));
}

Matrix apply_kraus(std::span<const Matrix> kraus_ops, const Matrix& rho) {
  Matrix out = Matrix::Zero(kraus_ops.front().rows(), kraus_ops.front().rows());
  for (const Matrix& k : kraus_ops) out.noalias() += k * rho * k.adjoint();
  return 0.5 * (out + out.adjoint());
}

DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho) {
  require_same_dim(ch.dim_in(), rho.dim(), "channel input");
  if (ch.mode() != ChannelMode::kTracePreserving) {
    throw QkdError(ErrorKind::kNotCptp, "a density operator needs a trace-preserving channel");
  }
  return DensityOperator::validate(apply_kraus(ch.kraus_ops(), rho.matrix()));
}

SubnormalizedOperator apply_channel(const KrausChannel& ch, const SubnormalizedOperator& rho) {
  require_same_dim(ch.dim_in(), rho.dim(), "channel input");
  return SubnormalizedOperator::validate(apply_kraus(ch.kraus_ops(), rho.matrix()));
}

std::vector<double> measure(const Povm& povm, const DensityOperator& rho) {
  std::vector<double> p;
  p.reserve(povm.elements().size());
  for (const auto& e : povm.elements()) {
    require_same_dim(e.dim(), rho.dim(), "POVM element");
    p.push_back((e.matrix() * rho.matrix()).trace().real());
  }
  return p;
}

HelstromMeasurement helstrom(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho.dim(), sigma.dim(), "helstrom");
  const HermitianOperator delta = rho.op() - sigma.op();
  const Spectrum s = eigh(delta);
  RealVector mask(s.values.size());
  for (Eigen::Index i = 0; i < s.values.size(); ++i) mask(i) = s.values(i) > 0.0 ? 1.0 : 0.0;
  const Matrix proj = s.vectors * mask.cast<Complex>().asDiagonal() * s.vectors.adjoint();
  const double advantage = s.values.cwiseMax(0.0).sum();
  return {HermitianOperator::symmetrized(proj), advantage};
}

void require_effect(const HermitianOperator& effect, const Tolerances& tol) {
  const Spectrum s = eigh(effect);
  const double slack = tol.psd_threshold(s.values.cwiseAbs().sum());
  if (s.values.minCoeff() < -slack || s.values.maxCoeff() > 1.0 + slack) {
    throw QkdError(ErrorKind::kBadEffect, "effect eigenvalues must lie in [0, 1]");
  }
}

}  // namespace qkdkit

// Copyright 2026 The lindblad Authors
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

#pragma once

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lindblad/matrix_core.hpp"

namespace lindblad {

/// Absolute tolerance used by validate() and friends unless overridden.
inline constexpr double kStateTol = 1e-10;

using FactorDims = std::vector<Index>;

/// Eigenvalues (ascending) of the Hermitian part (m + m^dagger) / 2.
inline Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
  require_square(m, "hermitian_eigenvalues");
  if (m.rows() == 0) return {};
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

inline double min_hermitian_eigenvalue(const ComplexMatrix& m) {
  const auto ev = hermitian_eigenvalues(m);
  return ev.size() ? ev(0) : 0.0;
}

namespace detail {

inline Index factor_product(const FactorDims& dims) {
  Index p = 1;
  for (Index d : dims) {
    if (d <= 0) throw DimensionError("factor dimensions must be positive");
    p = checked_product(p, d);
  }
  return p;
}

inline std::string fmt_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

class DensityMatrix;
DensityMatrix validate(const ComplexMatrix& m, FactorDims factor_dims = {}, double tol = kStateTol);

/// A validated quantum state: unit trace, Hermitian, positive semidefinite,
/// purity within [1/d, 1]. Only obtainable through validate() or from_pure().
class DensityMatrix {
 public:
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Index dim() const noexcept { return matrix_.rows(); }
  const FactorDims& factor_dims() const noexcept { return factor_dims_; }
  Complex operator()(Index i, Index j) const { return matrix_(i, j); }

 private:
  DensityMatrix(ComplexMatrix m, FactorDims dims) : matrix_(std::move(m)), factor_dims_(std::move(dims)) {}
  friend DensityMatrix validate(const ComplexMatrix&, FactorDims, double);

  ComplexMatrix matrix_;
  FactorDims factor_dims_;
};

/// Checks the density-matrix invariants in order (trace, Hermiticity,
/// positivity, purity) and throws on the first violation. An empty
/// factor_dims means the trivial factorization {d}.
inline DensityMatrix validate(const ComplexMatrix& m, FactorDims factor_dims, double tol) {
  require_square(m, "validate");
  const Index d = m.rows();
  if (d == 0) throw DimensionError("validate: empty matrix");
  if (factor_dims.empty()) factor_dims = {d};
  if (detail::factor_product(factor_dims) != d) throw DimensionError("validate: factor dimensions do not multiply to d");
  if (!all_finite(m)) throw NonFiniteError("validate: non-finite entries");

  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0)) > tol)
    throw TraceError("trace is " + detail::fmt_value(tr.real()) + ", expected 1", tr.real());
  const double herm = hermiticity_residual(m);
  if (herm > tol) throw HermiticityError("not Hermitian: residual " + detail::fmt_value(herm), herm);
  const double lmin = min_hermitian_eigenvalue(m);
  if (lmin < -tol) throw PositivityError("not positive semidefinite: eigenvalue " + detail::fmt_value(lmin), lmin);
  const double pur = (m * m).trace().real();
  if (pur < 1.0 / static_cast<double>(d) - tol || pur > 1.0 + tol)
    throw PurityError("purity " + detail::fmt_value(pur) + " outside [1/d, 1]", pur);
  return DensityMatrix(m, std::move(factor_dims));
}

/// |psi><psi|. Vectors within 1e-8 of unit norm are renormalized; others are rejected.
inline DensityMatrix from_pure(const ComplexVector& psi, FactorDims factor_dims = {}) {
  const double norm = psi.norm();
  if (norm == 0.0) throw NormalizationError("from_pure: zero vector", 0.0);
  if (std::abs(norm - 1.0) > 1e-8) throw NormalizationError("from_pure: vector norm " + detail::fmt_value(norm) + " is not 1", norm);
  const ComplexVector unit = psi / norm;
  ComplexMatrix rho = outer(unit, unit);
  return validate(rho, std::move(factor_dims));
}

/// Tr[rho^2]
inline double purity(const DensityMatrix& rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

/// Tr[m^2] for an arbitrary (possibly drifted) Hermitian matrix.
inline double raw_purity(const ComplexMatrix& m) { return (m * m).trace().real(); }

/// Reduced state on factor `keep` (0-based), tracing out every other factor.
inline DensityMatrix partial_trace(const DensityMatrix& rho, Index keep, double tol = kStateTol) {
  const FactorDims& dims = rho.factor_dims();
  if (dims.size() < 2) throw DimensionError("partial_trace: state has no declared multipartite factorization");
  if (keep < 0 || keep >= static_cast<Index>(dims.size()))
    throw DimensionError("partial_trace: subsystem index " + std::to_string(keep) + " out of range");

  // Full index = (outer * dk + k) * inner + in, with `outer`/`inner` the
  // combined indices of the factors before/after `keep`.
  Index outer_dim = 1, inner_dim = 1;
  for (Index f = 0; f < keep; ++f) outer_dim *= dims[f];
  for (Index f = keep + 1; f < static_cast<Index>(dims.size()); ++f) inner_dim *= dims[f];
  const Index dk = dims[keep];

  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Index a = 0; a < dk; ++a)
    for (Index b = 0; b < dk; ++b) {
      Complex acc = 0;
      for (Index o = 0; o < outer_dim; ++o)
        for (Index in = 0; in < inner_dim; ++in)
          acc += m((o * dk + a) * inner_dim + in, (o * dk + b) * inner_dim + in);
      out(a, b) = acc;
    }
  return validate(out, {dk}, tol);
}

/// A Hermitian operator.
class Observable {
 public:
  explicit Observable(ComplexMatrix m, double tol = kStateTol) : matrix_(std::move(m)) {
    require_square(matrix_, "Observable");
    const double herm = hermiticity_residual(matrix_);
    if (herm > tol) throw HermiticityError("observable is not Hermitian: residual " + detail::fmt_value(herm), herm);
  }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Index dim() const noexcept { return matrix_.rows(); }

 private:
  ComplexMatrix matrix_;
};

/// Re Tr[O m] for a raw Hermitian matrix; the imaginary residue must stay below tol * max(1, ||m||).
inline double expectation_raw(const Observable& obs, const ComplexMatrix& m, double tol = kStateTol) {
  if (obs.dim() != m.rows() || m.rows() != m.cols()) throw DimensionError("expectation: dimension mismatch");
  const Complex v = (obs.matrix() * m).trace();
  const double scale = std::max(1.0, max_abs(obs.matrix()) * static_cast<double>(m.rows()));
  if (std::abs(v.imag()) > tol * scale)
    throw HermiticityError("expectation has imaginary part " + detail::fmt_value(v.imag()), v.imag());
  return v.real();
}

/// <O> = Tr[O rho]
inline double expectation(const Observable& obs, const DensityMatrix& rho, double tol = kStateTol) {
  return expectation_raw(obs, rho.matrix(), tol);
}

/// P(a) = Tr[|a><a| rho] = <a|rho|a>
inline double measurement_probability(const ComplexVector& a, const DensityMatrix& rho, double tol = kStateTol) {
  if (a.size() != rho.dim()) throw DimensionError("measurement_probability: dimension mismatch");
  const double norm = a.norm();
  if (std::abs(norm - 1.0) > tol) throw NormalizationError("measurement vector has norm " + detail::fmt_value(norm), norm);
  const Complex p = a.dot(rho.matrix() * a);
  return p.real();
}

}  // namespace lindblad

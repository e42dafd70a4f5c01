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

// Quantum channels in Kraus form and their Choi matrices.
//
// Convention: a channel acts as rho -> sum_l K_l rho K_l^dagger and is trace
// preserving iff sum_l K_l^dagger K_l = I. The other common presentation,
// rho -> sum_l V_l^dagger rho V_l with sum_l V_l V_l^dagger = I, is the same
// thing with K_l = V_l^dagger.
//
// The Choi matrix uses the unnormalized maximally entangled vector
// |Gamma> = sum_i |i> (x) |i>, so C = sum_ij |i><j| (x) V(|i><j|) and Tr C = d
// for a trace-preserving map.

#include <algorithm>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lindblad/matrix_core.hpp"
#include "lindblad/states.hpp"

namespace lindblad {

/// Threshold for calling a Kraus set complete.
inline constexpr double kCompletenessTol = 1e-10;
/// Choi eigenvalues below this fraction of the largest one are dropped as numerical dust.
inline constexpr double kKrausTruncation = 1e-12;

/// max-norm of sum_l K_l^dagger K_l - I
inline double completeness_residual(const std::vector<ComplexMatrix>& kraus) {
  if (kraus.empty()) throw Error("channel needs at least one Kraus operator");
  const Index d = kraus.front().rows();
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  for (const auto& k : kraus) acc += k.adjoint() * k;
  return max_abs(acc - identity(d));
}

class QuantumChannel {
 public:
  explicit QuantumChannel(std::vector<ComplexMatrix> kraus) : kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw Error("channel needs at least one Kraus operator");
    const Index d = kraus_.front().rows();
    for (const auto& k : kraus_)
      if (k.rows() != d || k.cols() != d) throw DimensionError("Kraus operators must all be d x d");
    residual_ = lindblad::completeness_residual(kraus_);
  }

  const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }
  Index dim() const noexcept { return kraus_.front().rows(); }
  double completeness_residual() const noexcept { return residual_; }
  bool trace_preserving(double tol = kCompletenessTol) const noexcept { return residual_ <= tol; }

  /// sum_l K_l m K_l^dagger on an arbitrary operator.
  ComplexMatrix operator()(const ComplexMatrix& m) const {
    if (m.rows() != dim() || m.cols() != dim()) throw DimensionError("channel: operator dimension mismatch");
    ComplexMatrix out = ComplexMatrix::Zero(dim(), dim());
    for (const auto& k : kraus_) out += k * m * k.adjoint();
    return out;
  }

 private:
  std::vector<ComplexMatrix> kraus_;
  double residual_ = 0;
};

inline double check_completeness(const QuantumChannel& ch) { return ch.completeness_residual(); }

/// Applies the channel and re-validates the output. A failure on an
/// incomplete Kraus set is reported as NotTracePreservingError.
inline DensityMatrix apply_channel(const QuantumChannel& ch, const DensityMatrix& rho, double tol = kStateTol) {
  if (ch.dim() != rho.dim()) throw DimensionError("apply_channel: dimension mismatch");
  const ComplexMatrix out = ch(rho.matrix());
  try {
    return validate(out, rho.factor_dims(), tol);
  } catch (const ResidualError&) {
    if (!ch.trace_preserving())
      throw NotTracePreservingError("channel is not trace preserving: completeness residual " +
                                        detail::fmt_value(ch.completeness_residual()),
                                    ch.completeness_residual());
    throw;
  }
}

/// d^2 x d^2 matrix whose (i, j) block of size d x d is V(|i><j|).
class ChoiMatrix {
 public:
  ChoiMatrix(ComplexMatrix m, Index source_dim) : matrix_(std::move(m)), source_dim_(source_dim) {
    if (source_dim_ <= 0 || matrix_.rows() != source_dim_ * source_dim_ || matrix_.cols() != matrix_.rows())
      throw DimensionError("Choi matrix must be d^2 x d^2");
  }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Index source_dim() const noexcept { return source_dim_; }

  /// Block (i, j), i.e. the map applied to |i><j|.
  ComplexMatrix block(Index i, Index j) const {
    return matrix_.block(i * source_dim_, j * source_dim_, source_dim_, source_dim_);
  }

  /// Ascending eigenvalues of the Hermitian part.
  Eigen::VectorXd eigenvalues() const { return hermitian_eigenvalues(matrix_); }

  /// max_ij |Tr V(|i><j|) - delta_ij|; equals the Kraus completeness residual.
  double trace_preservation_residual() const {
    double r = 0;
    for (Index i = 0; i < source_dim_; ++i)
      for (Index j = 0; j < source_dim_; ++j)
        r = std::max(r, std::abs(block(i, j).trace() - (i == j ? Complex(1) : Complex(0))));
    return r;
  }

 private:
  ComplexMatrix matrix_;
  Index source_dim_;
};

using LinearMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

/// Choi matrix of an arbitrary linear map on d x d operators.
inline ChoiMatrix choi_matrix(const LinearMap& map, Index d) {
  ComplexMatrix c(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      const ComplexMatrix img = map(matrix_unit(d, i, j));
      if (img.rows() != d || img.cols() != d) throw DimensionError("choi_matrix: map must preserve the dimension");
      c.block(i * d, j * d, d, d) = img;
    }
  return ChoiMatrix(std::move(c), d);
}

inline ChoiMatrix choi_matrix(const QuantumChannel& ch) {
  return choi_matrix([&ch](const ComplexMatrix& m) { return ch(m); }, ch.dim());
}

/// Kraus operators from the spectral decomposition C = sum_l mu_l |v_l><v_l|.
/// Each |v_l> = (1 (x) K) |Gamma> gives K(j, i) = v_l[i d + j], scaled by sqrt(mu_l).
/// Throws NegativeChoiError when an eigenvalue is below -tol.
inline QuantumChannel kraus_from_choi(const ChoiMatrix& c, double tol = kStateTol) {
  const Index d = c.source_dim();
  const double herm = hermiticity_residual(c.matrix());
  if (herm > tol) throw HermiticityError("Choi matrix is not Hermitian: residual " + detail::fmt_value(herm), herm);

  const Eigen::MatrixXcd h = 0.5 * (c.matrix() + c.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  const auto& mu = solver.eigenvalues();
  if (mu(0) < -tol)
    throw NegativeChoiError("map is not completely positive: Choi eigenvalue " + detail::fmt_value(mu(0)), mu(0));

  const double mu_max = mu(mu.size() - 1);
  std::vector<ComplexMatrix> kraus;
  for (Index l = mu.size() - 1; l >= 0; --l) {
    if (mu_max <= 0 || mu(l) < kKrausTruncation * mu_max) break;
    const auto v = solver.eigenvectors().col(l);
    ComplexMatrix k(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) k(j, i) = v(i * d + j);
    kraus.push_back(std::sqrt(mu(l)) * k);
  }
  if (kraus.empty()) kraus.push_back(ComplexMatrix::Zero(d, d));
  return QuantumChannel(std::move(kraus));
}

/// Transposes the indices of factor `subsystem` only. Output is Hermitian for
/// Hermitian input but may be indefinite, so it is returned as a raw matrix.
inline ComplexMatrix partial_transpose(const ComplexMatrix& m, const FactorDims& dims, Index subsystem) {
  require_square(m, "partial_transpose");
  if (dims.size() < 2) throw DimensionError("partial_transpose: needs a declared multipartite factorization");
  if (detail::factor_product(dims) != m.rows()) throw DimensionError("partial_transpose: factor dimensions do not multiply to d");
  if (subsystem < 0 || subsystem >= static_cast<Index>(dims.size()))
    throw DimensionError("partial_transpose: subsystem index out of range");

  Index outer_dim = 1, inner_dim = 1;
  for (Index f = 0; f < subsystem; ++f) outer_dim *= dims[f];
  for (Index f = subsystem + 1; f < static_cast<Index>(dims.size()); ++f) inner_dim *= dims[f];
  const Index dk = dims[subsystem];
  auto index = [&](Index o, Index k, Index in) { return (o * dk + k) * inner_dim + in; };

  ComplexMatrix out(m.rows(), m.cols());
  for (Index o1 = 0; o1 < outer_dim; ++o1)
    for (Index a = 0; a < dk; ++a)
      for (Index i1 = 0; i1 < inner_dim; ++i1)
        for (Index o2 = 0; o2 < outer_dim; ++o2)
          for (Index b = 0; b < dk; ++b)
            for (Index i2 = 0; i2 < inner_dim; ++i2) out(index(o1, b, i1), index(o2, a, i2)) = m(index(o1, a, i1), index(o2, b, i2));
  return out;
}

inline ComplexMatrix partial_transpose(const DensityMatrix& rho, Index subsystem) {
  return partial_transpose(rho.matrix(), rho.factor_dims(), subsystem);
}

/// The transposition map m -> m^T (positive but not completely positive).
inline ComplexMatrix transpose_map(const ComplexMatrix& m) { return m.transpose(); }

}  // namespace lindblad

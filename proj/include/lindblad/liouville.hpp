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

// Fock-Liouville space: density matrices as vectors, the Lindblad generator
//
//   d rho / dt = -i [H, rho] + sum_k G_k ( L_k rho L_k^dagger - 1/2 {L_k^dagger L_k, rho} )
//
// as a d^2 x d^2 matrix, and its matrix-free evaluation.
//
// Vectorization is row-major: component i*d + j holds rho_ij, so for a qubit
// |rho>> = (rho_00, rho_01, rho_10, rho_11). Under this ordering
// vec(A rho B) = (A (x) B^T) vec(rho).

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lindblad/matrix_core.hpp"
#include "lindblad/states.hpp"

namespace lindblad {

struct JumpOperator {
  double rate = 0;  // G_k >= 0
  ComplexMatrix op;
};

/// Hamiltonian plus (rate, jump operator) pairs, in units with hbar = 1.
class LindbladModel {
 public:
  LindbladModel(ComplexMatrix hamiltonian, std::vector<JumpOperator> jumps, std::string label = {},
                double tol = kStateTol)
      : hamiltonian_(std::move(hamiltonian)), jumps_(std::move(jumps)), label_(std::move(label)) {
    require_square(hamiltonian_, "LindbladModel hamiltonian");
    if (!all_finite(hamiltonian_)) throw ModelError("hamiltonian has non-finite entries");
    const double herm = hermiticity_residual(hamiltonian_);
    if (herm > tol) throw ModelError("hamiltonian hermiticity violated: residual " + detail::fmt_value(herm));
    const Index d = hamiltonian_.rows();
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      const auto& j = jumps_[k];
      if (j.op.rows() != d || j.op.cols() != d)
        throw DimensionError("jump operator " + std::to_string(k) + " does not match the hamiltonian dimension");
      if (!std::isfinite(j.rate) || j.rate < 0)
        throw ModelError("jump rate " + std::to_string(k) + " must be finite and non-negative, got " +
                         detail::fmt_value(j.rate));
      if (!all_finite(j.op)) throw ModelError("jump operator " + std::to_string(k) + " has non-finite entries");
    }
  }

  const ComplexMatrix& hamiltonian() const noexcept { return hamiltonian_; }
  const std::vector<JumpOperator>& jumps() const noexcept { return jumps_; }
  const std::string& label() const noexcept { return label_; }
  Index dim() const noexcept { return hamiltonian_.rows(); }

 private:
  ComplexMatrix hamiltonian_;
  std::vector<JumpOperator> jumps_;
  std::string label_;
};

/// A density matrix stacked into a length-d^2 vector.
class FLVector {
 public:
  FLVector(ComplexVector values, Index dim) : values_(std::move(values)), dim_(dim) {
    if (dim_ < 0 || values_.size() != dim_ * dim_) throw DimensionError("FLVector length must be d^2");
  }
  const ComplexVector& values() const noexcept { return values_; }
  Index dim() const noexcept { return dim_; }

 private:
  ComplexVector values_;
  Index dim_;
};

inline FLVector vectorize(const ComplexMatrix& rho) {
  require_square(rho, "vectorize");
  // Row-major storage already is the stacking order.
  return FLVector(Eigen::Map<const ComplexVector>(rho.data(), rho.size()), rho.rows());
}

inline ComplexMatrix devectorize(const FLVector& v) {
  return Eigen::Map<const ComplexMatrix>(v.values().data(), v.dim(), v.dim());
}

/// Devectorizes a raw vector of length d^2.
inline ComplexMatrix devectorize(const ComplexVector& v) {
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) throw DimensionError("devectorize: length is not a perfect square");
  return devectorize(FLVector(v, d));
}

/// <<a|b>> = Tr[a^dagger b]
inline Complex fls_inner(const FLVector& a, const FLVector& b) {
  if (a.dim() != b.dim()) throw DimensionError("fls_inner: dimension mismatch");
  return a.values().dot(b.values());
}

struct LiouvillianMatrix {
  ComplexMatrix matrix;
  std::string model_label;

  Index hilbert_dim() const { return static_cast<Index>(std::llround(std::sqrt(static_cast<double>(matrix.rows())))); }

  /// max_c |sum_i matrix(i*d + i, c)|, i.e. how far <<I| L is from zero.
  double trace_residual() const {
    const Index d = hilbert_dim();
    double r = 0;
    for (Index c = 0; c < matrix.cols(); ++c) {
      Complex s = 0;
      for (Index i = 0; i < d; ++i) s += matrix(i * d + i, c);
      r = std::max(r, std::abs(s));
    }
    return r;
  }
};

/// L = -i (H (x) I - I (x) H^T) + sum_k G_k [ L_k (x) conj(L_k) - 1/2 L_k^dag L_k (x) I - 1/2 I (x) (L_k^dag L_k)^T ]
inline LiouvillianMatrix build_liouvillian(const LindbladModel& model) {
  const Index d = model.dim();
  const ComplexMatrix id = identity(d);
  const ComplexMatrix& h = model.hamiltonian();
  ComplexMatrix l = -kI * (tensor_product(h, id) - tensor_product(id, h.transpose()));
  for (const auto& jump : model.jumps()) {
    if (jump.rate == 0) continue;
    const ComplexMatrix ldl = jump.op.adjoint() * jump.op;
    l += jump.rate * (tensor_product(jump.op, jump.op.conjugate()) - 0.5 * tensor_product(ldl, id) -
                      0.5 * tensor_product(id, ldl.transpose()));
  }
  return {std::move(l), model.label()};
}

/// Lindblad right-hand side evaluated directly on the d x d matrix.
inline ComplexMatrix apply_rhs(const LindbladModel& model, const ComplexMatrix& rho) {
  if (rho.rows() != model.dim() || rho.cols() != model.dim()) throw DimensionError("apply_rhs: dimension mismatch");
  const ComplexMatrix& h = model.hamiltonian();
  ComplexMatrix out = -kI * (h * rho - rho * h);
  for (const auto& jump : model.jumps()) {
    if (jump.rate == 0) continue;
    const ComplexMatrix ldl = jump.op.adjoint() * jump.op;
    out += jump.rate * (jump.op * rho * jump.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

/// d/dt Tr[rho^2] = 2 Tr[rho L(rho)]. Non-positive whenever every jump operator is Hermitian.
inline double purity_rate(const LindbladModel& model, const DensityMatrix& rho, double tol = kStateTol) {
  const Complex r = 2.0 * (rho.matrix() * apply_rhs(model, rho.matrix())).trace();
  if (std::abs(r.imag()) > tol) throw HermiticityError("purity rate has imaginary part " + detail::fmt_value(r.imag()), r.imag());
  return r.real();
}

}  // namespace lindblad

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

// Dense complex linear algebra shared by every other header: the matrix type,
// Kronecker products, non-Hermitian eigendecomposition with paired left/right
// vectors, numerical null spaces and the action of a matrix exponential.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "lindblad/errors.hpp"

namespace lindblad {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Row-major storage: entry (i, j) lives at data()[i * cols() + j]. The
/// Fock-Liouville vectorization relies on this layout.
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

inline constexpr Complex kI{0.0, 1.0};

/// Relative residual above which an eigenpair is flagged.
inline constexpr double kEigenResidualTol = 1e-9;
/// Max deviation of l_i^dagger r_j from delta_ij above which an eigenpair is flagged.
inline constexpr double kBiorthogonalityTol = 1e-6;
/// Default kernel threshold, relative to the largest singular value.
inline constexpr double kKernelTol = 1e-10;

inline ComplexMatrix identity(Index d) { return ComplexMatrix::Identity(d, d); }

/// Standard basis vector |k> of dimension d.
inline ComplexVector basis_vector(Index d, Index k) {
  if (k < 0 || k >= d) throw DimensionError("basis index " + std::to_string(k) + " out of range for dimension " + std::to_string(d));
  ComplexVector v = ComplexVector::Zero(d);
  v(k) = 1.0;
  return v;
}

/// |a><b|
inline ComplexMatrix outer(const ComplexVector& a, const ComplexVector& b) { return a * b.adjoint(); }

/// |i><j| in dimension d.
inline ComplexMatrix matrix_unit(Index d, Index i, Index j) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

/// Largest absolute entry.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// max_ij |m_ij - conj(m_ji)|
inline double hermiticity_residual(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("hermiticity residual needs a square matrix");
  return max_abs(m - m.adjoint());
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw DimensionError(std::string(what) + ": expected a square matrix, got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
}

namespace detail {

inline Index checked_product(Index a, Index b) {
  Index out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw SizeError("dimension product overflows the index type");
  return out;
}

}  // namespace detail

/// Kronecker product a (x) b; block (i, j) of the result equals a(i, j) * b.
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Index rows = detail::checked_product(a.rows(), b.rows());
  const Index cols = detail::checked_product(a.cols(), b.cols());
  detail::checked_product(rows, cols);
  ComplexMatrix out(rows, cols);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Largest singular value (operator 2-norm).
inline double spectral_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::MatrixXcd m = a;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

/// Orthonormal basis of {v : ||A v|| <= tol * ||A||_2}, computed from the SVD.
/// An empty result is valid.
inline std::vector<ComplexVector> null_space(const ComplexMatrix& a, double tol = kKernelTol) {
  require_square(a, "null_space");
  if (!(tol > 0)) throw Error("null_space: tolerance must be positive");
  const Index n = a.rows();
  std::vector<ComplexVector> out;
  if (n == 0) return out;
  Eigen::MatrixXcd m = a;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double threshold = tol * s(0);
  for (Index k = 0; k < n; ++k)
    if (s(k) <= threshold) out.emplace_back(svd.matrixV().col(k));
  return out;
}

/// Per-eigenpair diagnostics. Residuals are relative to the Frobenius norm of A.
struct EigenpairQuality {
  double right_residual = 0;   // ||A r - lambda r|| / (||A|| ||r||)
  double left_residual = 0;    // ||l^dagger A - lambda l^dagger|| / (||A|| ||l||)
  double biorthogonality = 0;  // max_j |l^dagger r_j - delta_ij|
  double condition = 1;        // ||l|| ||r|| with l^dagger r = 1
  bool defective = false;      // member of an eigenvalue cluster lacking a full eigenspace
  bool flagged = false;
};

/// Eigenvalues with right vectors (unit norm) and left vectors scaled so that
/// l_i^dagger r_j = delta_ij whenever the matrix is diagonalizable.
struct SpectralDecomposition {
  std::vector<Complex> eigenvalues;
  std::vector<ComplexVector> right_vectors;
  std::vector<ComplexVector> left_vectors;
  std::vector<EigenpairQuality> quality;

  std::size_t size() const { return eigenvalues.size(); }

  bool diagonalizable() const {
    return std::none_of(quality.begin(), quality.end(), [](const EigenpairQuality& q) { return q.flagged; });
  }

  /// sum_i lambda_i r_i l_i^dagger
  ComplexMatrix reconstruct() const {
    const Index n = static_cast<Index>(size());
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < size(); ++i) out += eigenvalues[i] * right_vectors[i] * left_vectors[i].adjoint();
    return out;
  }

  /// Reorders all per-pair data by `order` (a permutation of 0..size-1).
  void permute(const std::vector<std::size_t>& order) {
    SpectralDecomposition out;
    for (std::size_t k : order) {
      out.eigenvalues.push_back(eigenvalues[k]);
      out.right_vectors.push_back(right_vectors[k]);
      out.left_vectors.push_back(left_vectors[k]);
      out.quality.push_back(quality[k]);
    }
    *this = std::move(out);
  }
};

/// Raised when the QR iteration does not converge; carries whatever eigenvalues were produced.
class EigenSolveError : public Error {
 public:
  EigenSolveError(const std::string& what, std::vector<Complex> partial) : Error(what), partial_(std::move(partial)) {}
  const std::vector<Complex>& partial_eigenvalues() const noexcept { return partial_; }

 private:
  std::vector<Complex> partial_;
};

/// General eigendecomposition of a square (possibly non-Hermitian) matrix.
///
/// Eigenvalues come from Hessenberg reduction followed by shifted QR on the
/// complex Schur form. Eigenvalues closer than 1e-9 ||A|| are treated as one
/// cluster whose right vectors are taken from the SVD null space of
/// (A - mean(lambda) I); a cluster with a deficient null space is marked
/// defective. Left vectors are the rows of the inverse right-vector matrix.
/// Pairs with residuals above 1e-9 or biorthogonality error above 1e-6 are
/// flagged rather than silently returned.
inline SpectralDecomposition eig_general(const ComplexMatrix& a) {
  require_square(a, "eig_general");
  if (!all_finite(a)) throw NonFiniteError("eig_general: matrix has non-finite entries");
  const Index n = a.rows();
  SpectralDecomposition out;
  if (n == 0) return out;

  const Eigen::MatrixXcd m = a;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, true);
  const auto& values = solver.eigenvalues();
  if (solver.info() != Eigen::Success) {
    std::vector<Complex> partial(values.data(), values.data() + values.size());
    throw EigenSolveError("eig_general: QR iteration did not converge", std::move(partial));
  }

  const double scale = m.norm() > 0 ? m.norm() : 1.0;
  Eigen::MatrixXcd right = solver.eigenvectors();
  std::vector<bool> defective(static_cast<std::size_t>(n), false);

  // Group near-equal eigenvalues (transitively).
  std::vector<Index> cluster(static_cast<std::size_t>(n), -1);
  Index n_clusters = 0;
  for (Index i = 0; i < n; ++i) {
    if (cluster[i] >= 0) continue;
    cluster[i] = n_clusters;
    std::vector<Index> stack{i};
    while (!stack.empty()) {
      const Index k = stack.back();
      stack.pop_back();
      for (Index j = 0; j < n; ++j)
        if (cluster[j] < 0 && std::abs(values(j) - values(k)) <= 1e-9 * scale) {
          cluster[j] = n_clusters;
          stack.push_back(j);
        }
    }
    ++n_clusters;
  }
  for (Index c = 0; c < n_clusters; ++c) {
    std::vector<Index> members;
    Complex mean = 0;
    for (Index i = 0; i < n; ++i)
      if (cluster[i] == c) {
        members.push_back(i);
        mean += values(i);
      }
    if (members.size() < 2) continue;
    mean /= static_cast<double>(members.size());
    const Eigen::MatrixXcd shifted = m - mean * Eigen::MatrixXcd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const Index mult = static_cast<Index>(members.size());
    if (s(n - mult) <= 1e-8 * scale) {
      for (Index k = 0; k < mult; ++k) right.col(members[k]) = svd.matrixV().col(n - mult + k);
    } else {
      for (Index i : members) defective[i] = true;
    }
  }

  Eigen::MatrixXcd left_inv;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(right);
  if (lu.isInvertible())
    left_inv = lu.inverse();
  else
    left_inv = right.completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::MatrixXcd gram = left_inv * right;

  for (Index i = 0; i < n; ++i) {
    const Complex lambda = values(i);
    ComplexVector r = right.col(i);
    ComplexVector l = left_inv.row(i).adjoint();
    EigenpairQuality q;
    const double rn = r.norm();
    const double ln = l.norm();
    q.right_residual = rn > 0 ? (m * r - lambda * r).norm() / (scale * rn) : std::numeric_limits<double>::infinity();
    q.left_residual = ln > 0 ? (l.adjoint() * m - lambda * l.adjoint()).norm() / (scale * ln)
                             : std::numeric_limits<double>::infinity();
    double bio = 0;
    for (Index j = 0; j < n; ++j) bio = std::max(bio, std::abs(gram(i, j) - (i == j ? Complex(1) : Complex(0))));
    q.biorthogonality = bio;
    q.condition = ln * rn;
    q.defective = defective[i];
    q.flagged = q.defective || !std::isfinite(q.right_residual) || !std::isfinite(q.left_residual) ||
                !std::isfinite(bio) || q.right_residual > kEigenResidualTol || q.left_residual > kEigenResidualTol ||
                bio > kBiorthogonalityTol;
    out.eigenvalues.push_back(lambda);
    out.right_vectors.push_back(std::move(r));
    out.left_vectors.push_back(std::move(l));
    out.quality.push_back(q);
  }
  return out;
}

/// exp(t A) v, via Pade scaling-and-squaring of the full exponential.
inline ComplexVector expm_action(const ComplexMatrix& a, const ComplexVector& v, double t) {
  require_square(a, "expm_action");
  if (a.rows() != v.size()) throw DimensionError("expm_action: vector length does not match matrix dimension");
  if (!std::isfinite(t) || !all_finite(a) || !all_finite(v)) throw NonFiniteError("expm_action: non-finite input");
  if (a.rows() == 0) return v;
  const Eigen::MatrixXcd scaled = Complex(t) * Eigen::MatrixXcd(a);
  const Eigen::MatrixXcd propagator = scaled.exp();
  ComplexVector out = propagator * v;
  if (!all_finite(out)) throw NonFiniteError("expm_action: result overflowed");
  return out;
}

/// exp(t A) as a matrix.
inline ComplexMatrix expm(const ComplexMatrix& a, double t = 1.0) {
  require_square(a, "expm");
  if (!std::isfinite(t) || !all_finite(a)) throw NonFiniteError("expm: non-finite input");
  const Eigen::MatrixXcd scaled = Complex(t) * Eigen::MatrixXcd(a);
  return scaled.exp();
}

}  // namespace lindblad

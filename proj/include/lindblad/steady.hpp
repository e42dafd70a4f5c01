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

#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "lindblad/liouville.hpp"
#include "lindblad/matrix_core.hpp"
#include "lindblad/states.hpp"

namespace lindblad {

/// Largest eigenvalue real part tolerated before a generator is reported as non-contractive.
inline constexpr double kContractivityTol = 1e-9;

struct SpectrumReport {
  SpectralDecomposition decomposition;  // sorted by real part, descending
  double spectral_gap = 0;              // -max{Re lambda : |lambda| > threshold}; 0 if no such eigenvalue
  std::size_t zero_eigenvalues = 0;     // |lambda| <= threshold
  double threshold = 0;                 // kKernelTol * ||L||_2
  bool conjugation_closed = true;       // spectrum equals its complex conjugate as a multiset
  bool contractive = true;              // every Re lambda <= kContractivityTol
};

namespace detail {

/// Greedy multiset match of {lambda} against {conj(lambda)}.
inline bool closed_under_conjugation(const std::vector<Complex>& values, double tol) {
  std::vector<bool> used(values.size(), false);
  for (const auto& v : values) {
    bool found = false;
    for (std::size_t j = 0; j < values.size(); ++j)
      if (!used[j] && std::abs(values[j] - std::conj(v)) <= tol) {
        used[j] = found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

inline SpectrumReport spectrum_of(const ComplexMatrix& l) {
  SpectrumReport rep;
  rep.decomposition = eig_general(l);
  auto& dec = rep.decomposition;
  std::vector<std::size_t> order(dec.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Complex x = dec.eigenvalues[a], y = dec.eigenvalues[b];
    return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
  });
  dec.permute(order);

  const double norm = spectral_norm(l);
  rep.threshold = kKernelTol * norm;
  bool have_nonzero = false;
  double max_re = 0;
  for (const auto& v : dec.eigenvalues) {
    if (v.real() > kContractivityTol * std::max(1.0, norm)) rep.contractive = false;
    if (std::abs(v) <= rep.threshold) {
      ++rep.zero_eigenvalues;
    } else if (!have_nonzero || v.real() > max_re) {
      max_re = v.real();
      have_nonzero = true;
    }
  }
  rep.spectral_gap = have_nonzero ? -max_re : 0.0;
  rep.conjugation_closed = closed_under_conjugation(dec.eigenvalues, 1e-9 * std::max(1.0, norm));
  return rep;
}

}  // namespace detail

/// Full Liouvillian spectrum with gap and conjugation-symmetry check.
inline SpectrumReport liouvillian_spectrum(const LindbladModel& model) {
  return detail::spectrum_of(build_liouvillian(model).matrix);
}

struct SteadyStateReport {
  std::optional<DensityMatrix> state;  // set only for a one-dimensional kernel
  std::vector<ComplexMatrix> kernel;   // devectorized kernel basis, un-normalized
  std::size_t kernel_dimension = 0;
  double spectral_gap = 0;
  double residual = 0;        // ||L vec(rho_ss)||_2, unique case only
  double liouvillian_norm = 0;
  std::vector<Complex> eigenvalues;
  bool contractive = true;

  bool unique() const { return state.has_value(); }
};

/// Steady state from the SVD kernel of the Liouvillian. A one-dimensional
/// kernel is devectorized, symmetrized, normalized to unit trace and
/// validated; a larger kernel is reported raw (symmetry-protected degeneracy).
inline SteadyStateReport steady_state(const LindbladModel& model, double validate_tol = kStateTol) {
  const ComplexMatrix l = build_liouvillian(model).matrix;
  const auto spectrum = detail::spectrum_of(l);
  SteadyStateReport rep;
  rep.spectral_gap = spectrum.spectral_gap;
  rep.eigenvalues = spectrum.decomposition.eigenvalues;
  rep.contractive = spectrum.contractive;
  rep.liouvillian_norm = spectral_norm(l);

  const auto kernel = null_space(l, kKernelTol);
  rep.kernel_dimension = kernel.size();
  for (const auto& v : kernel) rep.kernel.push_back(devectorize(v));
  if (kernel.size() != 1) return rep;

  ComplexMatrix rho = rep.kernel.front();
  rho /= rho.trace();
  rho = (0.5 * (rho + rho.adjoint())).eval();
  rep.residual = (l * vectorize(rho).values()).norm();
  rep.state = validate(rho, {}, validate_tol);
  return rep;
}

}  // namespace lindblad

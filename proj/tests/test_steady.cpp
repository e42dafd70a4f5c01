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

#include <cmath>

#include "gtest/gtest.h"
#include "lindblad/lindblad.hpp"
#include "support/test_support.hpp"

using namespace lindblad;
using namespace lindblad::testing;

TEST(steady_state, thermal_qubit_matches_closed_form_on_grid) {
  int points = 0, conjugate_matches = 0;
  for (double e : {0.0, 0.5, 1.0})
    for (double w : {0.0, 0.5, 1.0})
      for (double g : {0.1, 0.2})
        for (double n : {0.0, 0.5, 1.0}) {
          const auto rep = steady_state(presets::thermal_tls(e, w, g, n));
          ASSERT_TRUE(rep.unique()) << e << " " << w << " " << g << " " << n;
          const ComplexMatrix expected = box8_closed_form(e, w, g, n);
          const double direct = max_abs(rep.state->matrix() - expected);
          // The printed matrix is Hermitian, so the labeling ambiguity shows up as its conjugate.
          const double conjugate = max_abs(rep.state->matrix() - expected.conjugate());
          EXPECT_LE(std::min(direct, conjugate), 1e-9) << e << " " << w << " " << g << " " << n;
          if (conjugate < direct) ++conjugate_matches;
          ++points;
        }
  EXPECT_EQ(points, 54);
  // Coherences vanish without drive; where they don't, ours is the conjugate of the printed one.
  EXPECT_EQ(conjugate_matches, 36);
}

TEST(steady_state, undriven_thermal_qubit_is_diagonal) {
  for (double n : {0.0, 0.3, 1.0, 4.0}) {
    const auto rep = steady_state(presets::thermal_tls(1.0, 0.0, 0.2, n));
    ASSERT_TRUE(rep.unique());
    const double p = n / (1 + 2 * n);
    ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
    expected(0, 0) = 1 - p;
    expected(1, 1) = p;
    EXPECT_LE(max_abs(rep.state->matrix() - expected), 1e-12);
    // Detailed balance: up-flux equals down-flux.
    EXPECT_NEAR(0.2 * n * (1 - p), 0.2 * (1 + n) * p, 1e-14);
  }
}

TEST(steady_state, no_jumps_reports_degenerate_kernel) {
  Rng rng(71);
  for (Index d : {2, 3, 4}) {
    const auto rep = steady_state(LindbladModel(random_hermitian(rng, d), {}));
    EXPECT_FALSE(rep.unique());
    EXPECT_GE(rep.kernel_dimension, static_cast<std::size_t>(d));
    EXPECT_EQ(rep.kernel.size(), rep.kernel_dimension);
  }
  EXPECT_GE(steady_state(presets::driven_tls(1, 1)).kernel_dimension, 2u);
}

TEST(steady_state, residual_and_validation_on_random_models) {
  Rng rng(72);
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = 2 + trial % 3;
    const auto rep = steady_state(random_model(rng, d, 1 + trial % 3));
    EXPECT_GE(rep.kernel_dimension, 1u);
    EXPECT_TRUE(rep.contractive);
    if (!rep.unique()) continue;
    EXPECT_LE(rep.residual, 1e-9 * rep.liouvillian_norm);
    EXPECT_EQ(hermiticity_residual(rep.state->matrix()), 0.0);
  }
}

TEST(steady_state, invariant_under_unitary_jump_mixing) {
  Rng rng(73);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 2 + trial % 3;
    const int n = 2;
    const auto model = random_model(rng, d, n);
    const ComplexMatrix v = random_unitary(rng, n);
    std::vector<JumpOperator> mixed;
    for (int i = 0; i < n; ++i) {
      ComplexMatrix op = ComplexMatrix::Zero(d, d);
      for (int j = 0; j < n; ++j) op += v(i, j) * std::sqrt(model.jumps()[j].rate) * model.jumps()[j].op;
      mixed.push_back({1.0, op});
    }
    const auto a = steady_state(model), b = steady_state(LindbladModel(model.hamiltonian(), mixed));
    ASSERT_EQ(a.unique(), b.unique());
    if (a.unique()) {
      EXPECT_LE(max_abs(a.state->matrix() - b.state->matrix()), 1e-9);
    }
  }
}

TEST(steady_state, long_time_spectral_evolution_converges) {
  Rng rng(74);
  for (int trial = 0; trial < 10; ++trial) {
    const Index d = 2 + trial % 3;
    const auto model = random_model(rng, d, 2);
    const auto rep = steady_state(model);
    if (!rep.unique() || rep.spectral_gap <= 0) continue;
    const auto traj = evolve_spectral(model, random_density(rng, d), {1e3 / rep.spectral_gap}, {}, true);
    EXPECT_LE(max_abs(traj.states.back() - rep.state->matrix()), 1e-6);
  }
}

TEST(liouvillian_spectrum, undriven_decay_values_and_gap) {
  const auto rep = liouvillian_spectrum(presets::decaying_driven_tls(1.0, 0.0, 0.2));
  EXPECT_LE(multiset_distance(rep.decomposition.eigenvalues, decay_spectrum_omega0(1.0, 0.2)), 1e-9);
  EXPECT_EQ(rep.zero_eigenvalues, 1u);
  EXPECT_NEAR(rep.spectral_gap, 0.1, 1e-12);
  EXPECT_TRUE(rep.conjugation_closed);
  EXPECT_TRUE(rep.contractive);
  // Two real eigenvalues and one conjugate pair.
  int real = 0;
  for (const auto& v : rep.decomposition.eigenvalues) real += std::abs(v.imag()) <= 1e-12;
  EXPECT_EQ(real, 2);
}

TEST(liouvillian_spectrum, sorted_by_real_part_descending) {
  Rng rng(75);
  const auto rep = liouvillian_spectrum(random_model(rng, 3, 2));
  const auto& ev = rep.decomposition.eigenvalues;
  for (std::size_t k = 1; k < ev.size(); ++k) EXPECT_GE(ev[k - 1].real(), ev[k].real());
  EXPECT_NEAR(std::abs(ev.front()), 0.0, 1e-10);
}

TEST(liouvillian_spectrum, hamiltonian_only_spectrum_is_energy_differences) {
  Rng rng(76);
  const Index d = 3;
  const ComplexMatrix h = random_hermitian(rng, d);
  const Eigen::VectorXd en = hermitian_eigenvalues(h);
  std::vector<Complex> expected;
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) expected.push_back(Complex(0, -(en(a) - en(b))));
  const auto rep = liouvillian_spectrum(LindbladModel(h, {}));
  for (const auto& v : rep.decomposition.eigenvalues) EXPECT_NEAR(v.real(), 0.0, 1e-12);
  EXPECT_LE(multiset_distance(rep.decomposition.eigenvalues, expected), 1e-10);
  EXPECT_EQ(rep.zero_eigenvalues, static_cast<std::size_t>(d));
}

TEST(liouvillian_spectrum, closed_under_conjugation_on_random_models) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const auto rep = liouvillian_spectrum(random_model(rng, 2 + trial % 3, 1 + trial % 3));
    EXPECT_TRUE(rep.conjugation_closed);
    EXPECT_TRUE(rep.contractive);
    EXPECT_GE(rep.zero_eigenvalues, 1u);
  }
}

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

namespace {

IntegratorConfig config(Method m, double dt, double t_max) {
  IntegratorConfig cfg;
  cfg.method = m;
  cfg.dt = dt;
  cfg.t_max = t_max;
  return cfg;
}

std::vector<NamedObservable> populations() {
  return {{"p0", Observable(presets::projector(2, 0))}, {"p1", Observable(presets::projector(2, 1))}};
}

DensityMatrix excited() { return validate(matrix_unit(2, 1, 1)); }

/// exp(t L) rho0 through the library's Pade exponential.
ComplexMatrix reference_state(const LindbladModel& model, const DensityMatrix& rho0, double t) {
  const ComplexMatrix l = build_liouvillian(model).matrix;
  return devectorize(FLVector(expm_action(l, vectorize(rho0.matrix()).values(), t), model.dim()));
}

double final_error(const LindbladModel& model, const DensityMatrix& rho0, Method m, double dt, double t_max) {
  auto cfg = config(m, dt, t_max);
  cfg.record_states = true;
  const auto traj = evolve(model, rho0, cfg);
  return max_abs(traj.states.back() - reference_state(model, rho0, t_max));
}

}  // namespace

TEST(evolve_rk4, rabi_oscillations_match_analytic_formula) {
  const double e = 1, w = 1;
  const auto traj = evolve_rk4(presets::driven_tls(e, w), excited(), config(Method::rk4, 1e-3, 10), populations());
  const auto& p1 = traj.series("p1");
  double lo = 1, hi = 0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    EXPECT_NEAR(p1[k], rabi_excited_population(e, w, traj.times[k]), 1e-6);
    lo = std::min(lo, p1[k]);
    hi = std::max(hi, p1[k]);
  }
  EXPECT_NEAR(lo, 0.2, 1e-4);
  EXPECT_NEAR(hi, 1.0, 1e-12);
}

TEST(evolve, pure_decay_matches_exponential_for_every_method) {
  const double g = 0.1;
  const auto model = presets::decaying_driven_tls(1.0, 0.0, g);
  for (Method m : {Method::rk4, Method::crank_nicolson, Method::spectral}) {
    const auto traj = evolve(model, excited(), config(m, 1e-2, 50), populations());
    const auto& p1 = traj.series("p1");
    double worst = 0;
    for (std::size_t k = 0; k < traj.size(); ++k) worst = std::max(worst, std::abs(p1[k] - std::exp(-g * traj.times[k])));
    EXPECT_LE(worst, 1e-6) << method_name(m);
    EXPECT_NEAR(traj.times.back(), 50.0, 0.0);
  }
}

TEST(evolve, zero_duration_records_only_initial_state) {
  Rng rng(61);
  const auto rho0 = random_density(rng, 2);
  for (Method m : {Method::rk4, Method::crank_nicolson, Method::spectral}) {
    auto cfg = config(m, 1e-3, 0);
    cfg.record_states = true;
    const auto traj = evolve(presets::decaying_driven_tls(1, 1, 0.1), rho0, cfg);
    ASSERT_EQ(traj.size(), 1u) << method_name(m);
    EXPECT_EQ(traj.times.front(), 0.0);
    EXPECT_LE(max_abs(traj.states.front() - rho0.matrix()), 1e-12);
  }
}

TEST(evolve, series_lengths_and_strictly_increasing_times) {
  auto cfg = config(Method::rk4, 0.3, 1.0);
  cfg.record_states = true;
  const auto traj = evolve(presets::decaying_driven_tls(1, 1, 0.1), excited(), cfg, populations());
  // 0.3, 0.6, 0.9 and a shortened final step to 1.0.
  ASSERT_EQ(traj.size(), 5u);
  EXPECT_DOUBLE_EQ(traj.times.back(), 1.0);
  for (std::size_t k = 1; k < traj.size(); ++k) EXPECT_GT(traj.times[k], traj.times[k - 1]);
  EXPECT_EQ(traj.states.size(), traj.size());
  EXPECT_EQ(traj.trace_drift.size(), traj.size());
  EXPECT_EQ(traj.purity.size(), traj.size());
  EXPECT_EQ(traj.series("p0").size(), traj.size());
  EXPECT_THROW(traj.series("nope"), Error);
}

TEST(evolve, record_every_thins_the_grid) {
  auto cfg = config(Method::crank_nicolson, 0.01, 1.0);
  cfg.record_every = 10;
  const auto traj = evolve(presets::decaying_driven_tls(1, 1, 0.1), excited(), cfg);
  EXPECT_EQ(traj.size(), 11u);
  EXPECT_EQ(time_grid(cfg).size(), 11u);
}

TEST(integrator_config, rejects_bad_steps) {
  const auto model = presets::driven_tls(1, 1);
  EXPECT_THROW(evolve(model, excited(), config(Method::rk4, 0, 1)), Error);
  EXPECT_THROW(evolve(model, excited(), config(Method::rk4, -1e-3, 1)), Error);
  EXPECT_THROW(evolve(model, excited(), config(Method::rk4, 2, 1)), Error);
  EXPECT_THROW(evolve(model, excited(), config(Method::rk4, 1e-3, NAN)), Error);
  EXPECT_THROW(evolve(model, validate(identity(3) / 3.0), config(Method::rk4, 1e-3, 1)), DimensionError);
}

TEST(evolve_crank_nicolson, trace_drift_over_many_steps) {
  const auto traj =
      evolve_crank_nicolson(presets::decaying_driven_tls(1, 1, 0.1), excited(), config(Method::crank_nicolson, 1e-3, 100));
  ASSERT_EQ(traj.size(), 100001u);
  EXPECT_LE(*std::max_element(traj.trace_drift.begin(), traj.trace_drift.end()), 1e-12);
}

TEST(evolve_rk4, trace_drift_is_recorded_and_small) {
  const auto traj = evolve_rk4(presets::decaying_driven_tls(1, 1, 0.1), excited(), config(Method::rk4, 1e-3, 20));
  EXPECT_LE(*std::max_element(traj.trace_drift.begin(), traj.trace_drift.end()), 1e-8);
}

TEST(evolve, renormalization_happens_after_drift_is_recorded) {
  // Coarse steps on a stiff model; drift is identical with and without renormalization.
  const auto model = presets::decaying_driven_tls(1, 3, 2.0);
  auto raw = config(Method::rk4, 0.05, 2);
  raw.record_states = true;
  auto renorm = raw;
  renorm.renormalize_trace = true;
  const auto a = evolve(model, excited(), raw);
  const auto b = evolve(model, excited(), renorm);
  for (std::size_t k = 0; k < b.size(); ++k) EXPECT_NEAR(std::abs(b.states[k].trace() - Complex(1)), 0.0, 1e-14);
  EXPECT_EQ(a.trace_drift.front(), b.trace_drift.front());
  EXPECT_NEAR(a.trace_drift[1], b.trace_drift[1], 1e-15);
}

TEST(evolve_crank_nicolson, one_step_is_pade_approximant) {
  Rng rng(62);
  const auto model = random_model(rng, 3, 2);
  const auto rho0 = random_density(rng, 3);
  const double h = 0.05;
  auto cfg = config(Method::crank_nicolson, h, h);
  cfg.record_states = true;
  const auto traj = evolve_crank_nicolson(model, rho0, cfg);
  // (1,1) Pade: (I - hL/2) x = (I + hL/2) v, solved here with a full-pivot LU.
  const Eigen::MatrixXcd l = build_liouvillian(model).matrix;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(9, 9);
  const Eigen::VectorXcd v = vectorize(rho0.matrix()).values();
  const Eigen::VectorXcd x = (id - 0.5 * h * l).fullPivLu().solve((id + 0.5 * h * l) * v);
  EXPECT_LE(max_abs(traj.states.back() - devectorize(ComplexVector(x))), 1e-14);
}

TEST(evolve_spectral, reconstructs_initial_state) {
  Rng rng(63);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 2 + trial % 3;
    const auto model = random_model(rng, d, 1 + trial % 2);
    const auto rho0 = random_density(rng, d);
    const auto traj = evolve_spectral(model, rho0, {0.0}, {}, true);
    EXPECT_LE(max_abs(traj.states.front() - rho0.matrix()), 1e-9);
  }
}

TEST(evolve_spectral, long_time_limit_is_normalized_kernel_vector) {
  const double g = 0.1;
  const auto model = presets::decaying_driven_tls(1, 1, g);
  const auto traj = evolve_spectral(model, excited(), {50 / g}, {}, true);
  const auto ss = steady_state(model);
  ASSERT_TRUE(ss.unique());
  EXPECT_LE(max_abs(traj.states.back() - ss.state->matrix()), 1e-9);
}

/// Max entrywise deviation between two methods over a dt = 1e-3 run to t_max.
static double pairwise_deviation(const LindbladModel& model, double t_max, Method a, Method b) {
  std::vector<Trajectory> runs;
  for (Method m : {a, b}) {
    auto cfg = config(m, 1e-3, t_max);
    cfg.record_states = true;
    cfg.record_every = 100;
    runs.push_back(evolve(model, excited(), cfg));
  }
  double worst = 0;
  for (std::size_t k = 0; k < runs[0].size(); ++k) worst = std::max(worst, max_abs(runs[0].states[k] - runs[1].states[k]));
  return worst;
}

TEST(evolve, methods_agree_pairwise_on_pure_decay) {
  const auto model = presets::decaying_driven_tls(1, 0, 0.1);
  EXPECT_LE(pairwise_deviation(model, 50, Method::rk4, Method::crank_nicolson), 1e-6);
  EXPECT_LE(pairwise_deviation(model, 50, Method::rk4, Method::spectral), 1e-6);
  EXPECT_LE(pairwise_deviation(model, 50, Method::crank_nicolson, Method::spectral), 1e-6);
}

TEST(evolve, rk4_and_spectral_agree_on_driven_decay) {
  EXPECT_LE(pairwise_deviation(presets::decaying_driven_tls(1, 1, 0.1), 20, Method::rk4, Method::spectral), 1e-6);
}

TEST(evolve, crank_nicolson_agrees_with_others_on_driven_decay) {
  const auto model = presets::decaying_driven_tls(1, 1, 0.1);
  EXPECT_LE(pairwise_deviation(model, 20, Method::crank_nicolson, Method::rk4), 1e-6);
  EXPECT_LE(pairwise_deviation(model, 20, Method::crank_nicolson, Method::spectral), 1e-6);
}

TEST(evolve, matches_matrix_exponential_on_random_models) {
  Rng rng(64);
  for (int trial = 0; trial < 12; ++trial) {
    const Index d = 2 + trial % 3;
    const auto model = random_model(rng, d, 1 + trial % 3);
    const auto rho0 = random_density(rng, d);
    for (Method m : {Method::rk4, Method::crank_nicolson, Method::spectral})
      EXPECT_LE(final_error(model, rho0, m, 1e-3, 1.0), 1e-6) << method_name(m) << " d=" << d;
  }
}

TEST(evolve, convergence_order_under_step_halving) {
  Rng rng(65);
  for (int trial = 0; trial < 5; ++trial) {
    const Index d = 2 + trial % 3;
    const auto model = random_model(rng, d, 2);
    const auto rho0 = random_density(rng, d);
    const double rk4 = std::log2(final_error(model, rho0, Method::rk4, 0.1, 2.0) /
                                 final_error(model, rho0, Method::rk4, 0.05, 2.0));
    const double cn = std::log2(final_error(model, rho0, Method::crank_nicolson, 0.1, 2.0) /
                                final_error(model, rho0, Method::crank_nicolson, 0.05, 2.0));
    EXPECT_NEAR(rk4, 4.0, 0.3);
    EXPECT_NEAR(cn, 2.0, 0.3);
  }
}

TEST(evolve, recorded_states_stay_hermitian) {
  Rng rng(66);
  for (Method m : {Method::rk4, Method::crank_nicolson, Method::spectral}) {
    const auto model = random_model(rng, 3, 2);
    auto cfg = config(m, 1e-2, 2);
    cfg.record_states = true;
    const auto traj = evolve(model, random_density(rng, 3), cfg);
    for (const auto& s : traj.states) EXPECT_LE(hermiticity_residual(s), 1e-9);
    for (double v : traj.min_eigenvalue) EXPECT_GE(v, -1e-9);
  }
}

TEST(evolve, hamiltonian_dynamics_keeps_purity_constant) {
  Rng rng(67);
  const LindbladModel model(random_hermitian(rng, 3), {});
  const auto rho0 = random_density(rng, 3);
  for (Method m : {Method::rk4, Method::crank_nicolson, Method::spectral}) {
    const auto traj = evolve(model, rho0, config(m, 1e-3, 5));
    for (double p : traj.purity) EXPECT_NEAR(p, traj.purity.front(), 1e-9) << method_name(m);
  }
}

TEST(evolve_rk4, divergence_reports_time_and_partial_trajectory) {
  const LindbladModel model(identity(2), {{1e100, presets::sigma_minus()}});
  try {
    evolve_rk4(model, excited(), config(Method::rk4, 1, 10));
    FAIL() << "expected StepDivergence";
  } catch (const StepDivergence& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_GE(e.partial().size(), 1u);
    EXPECT_EQ(e.partial().times.front(), 0.0);
  }
}

TEST(evolve_spectral, refuses_defective_liouvillian) {
  // Resonant driven decay has an exceptional point at drive = rate / 8.
  const auto model = presets::decaying_driven_tls(0.0, 0.0125, 0.1);
  EXPECT_THROW(evolve_spectral(model, excited(), {0.0, 1.0}), DefectiveLiouvillian);
  EXPECT_NO_THROW(evolve_rk4(model, excited(), config(Method::rk4, 1e-2, 1)));
}

TEST(evolve_spectral, rejects_unordered_times) {
  EXPECT_THROW(evolve_spectral(presets::decaying_driven_tls(1, 1, 0.1), excited(), {1.0, 0.5}), Error);
}

TEST(step_stiffness, default_step_is_comfortable_for_presets) {
  EXPECT_LT(step_stiffness(presets::decaying_driven_tls(1, 1, 0.1), 1e-3), 0.1);
  EXPECT_LT(step_stiffness(presets::thermal_tls(1, 1, 0.2, 1), 1e-3), 0.1);
  EXPECT_GT(step_stiffness(presets::driven_tls(100, 100), 1e-3), 0.1);
}

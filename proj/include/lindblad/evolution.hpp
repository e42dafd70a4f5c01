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

// Time evolution of a Lindblad model by fixed-step RK4, Crank-Nicolson in
// Fock-Liouville space, or spectral propagation through the biorthogonal
// eigenbasis of the Liouvillian.
//
// States along a trajectory are stored as raw matrices: integration drifts off
// the density-matrix manifold by design of the methods, and that drift is
// reported (trace_drift, min_eigenvalue) rather than hidden. Callers that need
// a DensityMatrix re-validate with a loosened tolerance.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lindblad/liouville.hpp"
#include "lindblad/matrix_core.hpp"
#include "lindblad/states.hpp"

namespace lindblad {

enum class Method { rk4, crank_nicolson, spectral };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::rk4: return "rk4";
    case Method::crank_nicolson: return "cn";
    case Method::spectral: return "spectral";
  }
  return "?";
}

struct IntegratorConfig {
  Method method = Method::rk4;
  double dt = 1e-3;
  double t_max = 1.0;
  bool renormalize_trace = false;
  bool record_states = false;
  Index record_every = 1;  // record every n-th step (the final time is always recorded)

  void check() const {
    if (!(dt > 0) || !std::isfinite(dt)) throw Error("integrator: dt must be positive and finite");
    if (!(t_max >= 0) || !std::isfinite(t_max)) throw Error("integrator: t_max must be non-negative and finite");
    if (t_max > 0 && dt > t_max) throw Error("integrator: dt must not exceed t_max");
    if (record_every < 1) throw Error("integrator: record_every must be >= 1");
  }
};

struct NamedObservable {
  std::string name;
  Observable observable;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexMatrix> states;  // empty unless record_states
  std::vector<std::pair<std::string, std::vector<double>>> observables;
  std::vector<double> trace_drift;     // |Tr rho - 1| before any renormalization
  std::vector<double> purity;          // Tr[rho^2]
  std::vector<double> min_eigenvalue;  // of the Hermitian part; negative values are positivity violations

  std::size_t size() const { return times.size(); }

  const std::vector<double>& series(const std::string& name) const {
    for (const auto& [n, s] : observables)
      if (n == name) return s;
    throw Error("trajectory has no observable named '" + name + "'");
  }
};

/// The state stopped being finite. Carries the trajectory recorded so far.
class StepDivergence : public Error {
 public:
  StepDivergence(double time, Trajectory partial)
      : Error("integration diverged at t=" + detail::fmt_value(time)), time_(time), partial_(std::move(partial)) {}
  double time() const noexcept { return time_; }
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  double time_;
  Trajectory partial_;
};

namespace detail {

class Recorder {
 public:
  Recorder(const std::vector<NamedObservable>& obs, Index dim, bool keep_states)
      : obs_(obs), keep_states_(keep_states) {
    for (const auto& o : obs_) {
      if (o.observable.dim() != dim) throw DimensionError("observable '" + o.name + "' has the wrong dimension");
      traj_.observables.emplace_back(o.name, std::vector<double>{});
    }
  }

  /// `drift` is measured by the caller before renormalization.
  void record(double t, const ComplexMatrix& rho, double drift) {
    traj_.times.push_back(t);
    traj_.trace_drift.push_back(drift);
    traj_.purity.push_back(raw_purity(rho));
    traj_.min_eigenvalue.push_back(min_hermitian_eigenvalue(rho));
    const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
    for (std::size_t k = 0; k < obs_.size(); ++k)
      traj_.observables[k].second.push_back((obs_[k].observable.matrix() * herm).trace().real());
    if (keep_states_) traj_.states.push_back(rho);
  }

  Trajectory& trajectory() { return traj_; }

 private:
  const std::vector<NamedObservable>& obs_;
  bool keep_states_;
  Trajectory traj_;
};

inline double trace_drift(const ComplexMatrix& rho) { return std::abs(rho.trace() - Complex(1.0)); }

/// Number of steps; the last one is shortened so the grid ends exactly on t_max.
inline Index step_count(const IntegratorConfig& cfg) {
  if (cfg.t_max == 0) return 0;
  return static_cast<Index>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
}

inline double step_time(const IntegratorConfig& cfg, Index k, Index n) {
  return k == n ? cfg.t_max : std::min(static_cast<double>(k) * cfg.dt, cfg.t_max);
}

inline bool should_record(const IntegratorConfig& cfg, Index k, Index n) { return k == n || k % cfg.record_every == 0; }

/// Shared stepping loop; `advance(rho, h)` performs one step of size h in place.
template <typename Advance>
Trajectory run_stepper(const DensityMatrix& rho0, const IntegratorConfig& cfg, const std::vector<NamedObservable>& obs,
                       Advance&& advance) {
  Recorder rec(obs, rho0.dim(), cfg.record_states);
  ComplexMatrix rho = rho0.matrix();
  rec.record(0.0, rho, trace_drift(rho));
  const Index n = step_count(cfg);
  for (Index k = 1; k <= n; ++k) {
    const double t_prev = step_time(cfg, k - 1, n);
    const double t = step_time(cfg, k, n);
    advance(rho, t - t_prev);
    if (!all_finite(rho)) throw StepDivergence(t, std::move(rec.trajectory()));
    const double drift = trace_drift(rho);
    if (cfg.renormalize_trace) rho /= rho.trace();
    if (should_record(cfg, k, n)) rec.record(t, rho, drift);
  }
  return std::move(rec.trajectory());
}

}  // namespace detail

/// Classic fourth-order Runge-Kutta on d rho/dt = apply_rhs(model, rho).
inline Trajectory evolve_rk4(const LindbladModel& model, const DensityMatrix& rho0, IntegratorConfig cfg,
                             const std::vector<NamedObservable>& observables = {}) {
  cfg.method = Method::rk4;
  cfg.check();
  if (rho0.dim() != model.dim()) throw DimensionError("evolve_rk4: state and model dimensions differ");
  return detail::run_stepper(rho0, cfg, observables, [&model](ComplexMatrix& rho, double h) {
    const ComplexMatrix k1 = apply_rhs(model, rho);
    const ComplexMatrix k2 = apply_rhs(model, rho + (0.5 * h) * k1);
    const ComplexMatrix k3 = apply_rhs(model, rho + (0.5 * h) * k2);
    const ComplexMatrix k4 = apply_rhs(model, rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  });
}

/// One-step Crank-Nicolson propagator (I - h/2 L)^{-1} (I + h/2 L), the (1,1) Pade approximant of exp(h L).
inline ComplexMatrix crank_nicolson_propagator(const ComplexMatrix& liouvillian, double h) {
  const Index n = liouvillian.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd lhs = id - (0.5 * h) * Eigen::MatrixXcd(liouvillian);
  const Eigen::MatrixXcd rhs = id + (0.5 * h) * Eigen::MatrixXcd(liouvillian);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lhs);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12))
    throw StepSolveError("Crank-Nicolson: (I - dt/2 L) is singular to working precision (rcond " + detail::fmt_value(rcond) +
                         "); try a smaller dt");
  ComplexMatrix m = lu.solve(rhs);

  // <<I|M = <<I| holds exactly in exact arithmetic; the solve misses it by an
  // ulp, which compounds linearly over long runs. Restore it through the last
  // diagonal row.
  const auto d = static_cast<Index>(std::lround(std::sqrt(static_cast<double>(n))));
  if (d * d == n && d > 1) {
    const Index last = (d - 1) * (d + 1);
    ComplexMatrix rest = ComplexMatrix::Zero(1, n);
    for (Index k = 0; k + 1 < d; ++k) rest += m.row(k * (d + 1));
    m.row(last) = -rest;
    for (Index k = 0; k < d; ++k) m(last, k * (d + 1)) += 1.0;
  }
  return m;
}

/// Crank-Nicolson in Fock-Liouville space. The propagator is factorized once
/// per distinct step size, so a run costs one matrix-vector product per step.
inline Trajectory evolve_crank_nicolson(const LindbladModel& model, const DensityMatrix& rho0, IntegratorConfig cfg,
                                        const std::vector<NamedObservable>& observables = {}) {
  cfg.method = Method::crank_nicolson;
  cfg.check();
  if (rho0.dim() != model.dim()) throw DimensionError("evolve_crank_nicolson: state and model dimensions differ");
  const ComplexMatrix l = build_liouvillian(model).matrix;
  const ComplexMatrix full = cfg.t_max > 0 ? crank_nicolson_propagator(l, cfg.dt) : ComplexMatrix{};
  std::optional<ComplexMatrix> last;
  const Index d = model.dim();
  return detail::run_stepper(rho0, cfg, observables, [&](ComplexMatrix& rho, double h) {
    const ComplexMatrix* prop = &full;
    if (std::abs(h - cfg.dt) > 1e-12 * cfg.dt) {
      if (!last) last = crank_nicolson_propagator(l, h);
      prop = &*last;
    }
    const ComplexVector v = *prop * Eigen::Map<const ComplexVector>(rho.data(), rho.size());
    rho = Eigen::Map<const ComplexMatrix>(v.data(), d, d);
  });
}

/// Expansion of an initial state in the biorthonormal eigenbasis of a Liouvillian.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const LindbladModel& model) : dim_(model.dim()) {
    decomposition_ = eig_general(build_liouvillian(model).matrix);
    if (!decomposition_.diagonalizable())
      throw DefectiveLiouvillian("spectral propagation refused: Liouvillian has flagged (defective or ill-conditioned) eigenpairs");
  }

  const SpectralDecomposition& decomposition() const noexcept { return decomposition_; }

  /// Coefficients <<L_i|rho0>>.
  std::vector<Complex> coefficients(const ComplexMatrix& rho0) const {
    const FLVector v = vectorize(rho0);
    std::vector<Complex> c;
    for (const auto& l : decomposition_.left_vectors) c.push_back(l.dot(v.values()));
    return c;
  }

  /// |rho(t)>> = sum_i exp(lambda_i t) |R_i>> <<L_i|rho0>>
  ComplexMatrix evaluate(const std::vector<Complex>& coeffs, double t) const {
    ComplexVector v = ComplexVector::Zero(dim_ * dim_);
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      v += (std::exp(decomposition_.eigenvalues[i] * t) * coeffs[i]) * decomposition_.right_vectors[i];
    return devectorize(FLVector(std::move(v), dim_));
  }

 private:
  Index dim_;
  SpectralDecomposition decomposition_;
};

/// Evaluates rho(t) at each requested time without stepping.
inline Trajectory evolve_spectral(const LindbladModel& model, const DensityMatrix& rho0, const std::vector<double>& times,
                                  const std::vector<NamedObservable>& observables = {}, bool record_states = false,
                                  bool renormalize_trace = false) {
  if (rho0.dim() != model.dim()) throw DimensionError("evolve_spectral: state and model dimensions differ");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k])) throw Error("evolve_spectral: non-finite time");
    if (k > 0 && !(times[k] > times[k - 1])) throw Error("evolve_spectral: times must be strictly increasing");
  }
  const SpectralPropagator prop(model);
  const auto coeffs = prop.coefficients(rho0.matrix());
  detail::Recorder rec(observables, model.dim(), record_states);
  for (double t : times) {
    ComplexMatrix rho = prop.evaluate(coeffs, t);
    if (!all_finite(rho)) throw StepDivergence(t, std::move(rec.trajectory()));
    const double drift = detail::trace_drift(rho);
    if (renormalize_trace) rho /= rho.trace();
    rec.record(t, rho, drift);
  }
  return std::move(rec.trajectory());
}

/// The uniform time grid a stepping method would record for `cfg`.
inline std::vector<double> time_grid(const IntegratorConfig& cfg) {
  cfg.check();
  std::vector<double> out{0.0};
  const Index n = detail::step_count(cfg);
  for (Index k = 1; k <= n; ++k)
    if (detail::should_record(cfg, k, n)) out.push_back(detail::step_time(cfg, k, n));
  return out;
}

/// Dispatches on cfg.method. The spectral method is evaluated on time_grid(cfg).
inline Trajectory evolve(const LindbladModel& model, const DensityMatrix& rho0, const IntegratorConfig& cfg,
                         const std::vector<NamedObservable>& observables = {}) {
  switch (cfg.method) {
    case Method::rk4: return evolve_rk4(model, rho0, cfg, observables);
    case Method::crank_nicolson: return evolve_crank_nicolson(model, rho0, cfg, observables);
    case Method::spectral:
      return evolve_spectral(model, rho0, time_grid(cfg), observables, cfg.record_states, cfg.renormalize_trace);
  }
  throw Error("unknown integration method");
}

/// dt times the spectral radius of the Liouvillian; stepping is comfortable below 0.1.
inline double step_stiffness(const LindbladModel& model, double dt) {
  const auto dec = eig_general(build_liouvillian(model).matrix);
  double radius = 0;
  for (const auto& l : dec.eigenvalues) radius = std::max(radius, std::abs(l));
  return dt * radius;
}

}  // namespace lindblad

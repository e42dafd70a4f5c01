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

// lindblad: command-line front end.
//
//   lindblad validate MODEL.json
//   lindblad evolve   (MODEL.json | --preset NAME ...) [--method rk4|cn|spectral] [--dt] [--t-max] ...
//   lindblad steady   (MODEL.json | --preset NAME ...) [--out FILE]
//   lindblad spectrum (MODEL.json | --preset NAME ...) [--out FILE]
//   lindblad channel  check|choi|from-choi (--kraus FILE... | --choi FILE) [--out FILE]
//
// Exit codes: 0 ok, 1 invariant or CP failure, 2 parse failure, 3 degenerate
// kernel, 4 numerical failure (divergence, singular step, defective Liouvillian).

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lindblad/io.hpp"
#include "lindblad/lindblad.hpp"

namespace {

using namespace lindblad;
using io::format_number;

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitParse = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitNumerical = 4;

/// Model given either as a file or as a preset with parameters.
struct ModelSource {
  std::string path;
  std::string preset;
  double energy = 1.0;
  double omega = 1.0;
  double gamma = 0.1;
  double n = 0.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("model", path, "model JSON file");
    cmd->add_option("--preset", preset, "driven_tls | decaying_driven_tls | thermal_tls");
    cmd->add_option("--E", energy, "preset level splitting E")->capture_default_str();
    cmd->add_option("--Omega", omega, "preset drive Omega")->capture_default_str();
    cmd->add_option("--Gamma", gamma, "preset decay rate Gamma")->capture_default_str();
    cmd->add_option("--n", n, "preset thermal occupation n")->capture_default_str();
  }

  LindbladModel load() const {
    if (path.empty() == preset.empty()) throw io::ParseError("give exactly one of a model file or --preset");
    if (!path.empty()) return io::read_model(path);
    presets::PresetSpec spec;
    try {
      spec.name = presets::parse_name(preset);
    } catch (const ModelError& e) {
      throw io::ParseError(e.what());
    }
    spec.energy = energy;
    spec.drive = omega;
    spec.gamma = gamma;
    spec.n = n;
    return presets::make(spec);
  }
};

/// Writes to --out when given, otherwise to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw Error(path + ": cannot open for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

// ---------------------------------------------------------------- validate

int cmd_validate(const std::string& path) {
  const auto doc = io::read_model_document(path);
  std::cout << "model: " << path << "\n";
  if (!doc.label.empty()) std::cout << "label: " << doc.label << "\n";
  std::cout << "dim: " << doc.dim << "\n";

  bool finite = all_finite(doc.hamiltonian);
  for (const auto& j : doc.jumps) finite = finite && std::isfinite(j.rate) && all_finite(j.op);
  const double herm = hermiticity_residual(doc.hamiltonian);
  bool rates_ok = true;
  std::cout << "hamiltonian hermiticity residual: " << format_number(herm) << "\n";
  std::cout << "jumps: " << doc.jumps.size() << "\n";
  for (std::size_t k = 0; k < doc.jumps.size(); ++k) {
    std::cout << "  rate[" << k << "]: " << format_number(doc.jumps[k].rate) << "\n";
    rates_ok = rates_ok && doc.jumps[k].rate >= 0;
  }

  std::vector<std::pair<std::string, bool>> checks{
      {"finite entries", finite},
      {"hamiltonian hermiticity", finite && herm <= kStateTol},
      {"jump rates non-negative", rates_ok},
  };
  bool ok = true;
  for (const auto& [_, pass] : checks) ok = ok && pass;
  if (ok) {
    const auto l = build_liouvillian(io::to_model(doc));
    checks.push_back({"liouvillian trace preservation", l.trace_residual() <= 1e-12 * std::max(1.0, spectral_norm(l.matrix))});
    ok = checks.back().second;
  }
  for (const auto& [name, pass] : checks) std::cout << pass_fail(pass) << " " << name << "\n";
  std::cout << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kExitOk : kExitInvariant;
}

// ---------------------------------------------------------------- evolve

struct EvolveOptions {
  ModelSource source;
  std::string method = "rk4";
  double dt = 1e-3;
  double t_max = 1.0;
  Index record_every = 1;
  bool renormalize = false;
  std::string initial = "excited";
  std::vector<std::string> observables;
  std::string out;
};

Method parse_method(const std::string& s) {
  if (s == "rk4") return Method::rk4;
  if (s == "cn" || s == "crank_nicolson") return Method::crank_nicolson;
  if (s == "spectral") return Method::spectral;
  throw io::ParseError("unknown method '" + s + "' (expected rk4, cn or spectral)");
}

DensityMatrix initial_state(const std::string& spec, Index d) {
  if (spec == "excited") return validate(matrix_unit(d, d - 1, d - 1));
  if (spec == "ground") return validate(matrix_unit(d, 0, 0));
  if (spec == "mixed") return validate(identity(d) / static_cast<double>(d));
  const ComplexMatrix m = io::read_matrix(spec);
  if (m.rows() != d) throw io::ParseError(spec + ": initial state has dimension " + std::to_string(m.rows()) + ", model has " + std::to_string(d));
  return validate(m);
}

/// "pK" is the population of level K; "name=FILE" reads a Hermitian matrix.
NamedObservable parse_observable(const std::string& spec, Index d) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) {
    if (spec.size() >= 2 && spec[0] == 'p' && spec.find_first_not_of("0123456789", 1) == std::string::npos) {
      const Index k = io::parse_index(spec.substr(1));
      if (k >= d) throw io::ParseError("observable " + spec + ": level out of range for dim " + std::to_string(d));
      return {spec, Observable(presets::projector(d, k))};
    }
    throw io::ParseError("observable '" + spec + "': expected pK or name=FILE");
  }
  const std::string name = spec.substr(0, eq), file = spec.substr(eq + 1);
  if (name.empty() || name.find(',') != std::string::npos) throw io::ParseError("observable '" + spec + "': bad name");
  const ComplexMatrix m = io::read_matrix(file);
  if (m.rows() != d) throw io::ParseError(file + ": observable dimension does not match the model");
  return {name, Observable(m)};
}

void summarize(const Trajectory& traj, const IntegratorConfig& cfg) {
  double drift = 0, min_eig = INFINITY;
  for (double v : traj.trace_drift) drift = std::max(drift, v);
  for (double v : traj.min_eigenvalue) min_eig = std::min(min_eig, v);
  std::cerr << "method: " << method_name(cfg.method) << "\n"
            << "rows: " << traj.size() << "\n"
            << "max trace drift: " << format_number(drift) << "\n"
            << "min eigenvalue: " << format_number(min_eig) << "\n";
}

int cmd_evolve(const EvolveOptions& opt) {
  const LindbladModel model = opt.source.load();
  IntegratorConfig cfg;
  cfg.method = parse_method(opt.method);
  cfg.dt = opt.dt;
  cfg.t_max = opt.t_max;
  cfg.renormalize_trace = opt.renormalize;
  cfg.record_every = opt.record_every;
  try {
    cfg.check();
  } catch (const Error& e) {
    throw io::ParseError(e.what());
  }

  const DensityMatrix rho0 = initial_state(opt.initial, model.dim());
  std::vector<NamedObservable> obs;
  if (opt.observables.empty()) {
    for (Index k = 0; k < model.dim(); ++k) obs.push_back(parse_observable("p" + std::to_string(k), model.dim()));
  } else {
    for (const auto& s : opt.observables) obs.push_back(parse_observable(s, model.dim()));
  }

  if (cfg.method != Method::spectral) {
    const double stiffness = step_stiffness(model, cfg.dt);
    if (stiffness >= 0.1)
      std::cerr << "warning: dt * spectral radius = " << format_number(stiffness) << " >= 0.1; consider a smaller --dt\n";
  }

  Output out(opt.out);
  try {
    const Trajectory traj = evolve(model, rho0, cfg, obs);
    io::write_trajectory_csv(out.stream(), traj);
    summarize(traj, cfg);
  } catch (const StepDivergence& e) {
    io::write_trajectory_csv(out.stream(), e.partial());
    out.stream() << "# DIVERGED at t=" << format_number(e.time()) << "\n";
    out.stream().flush();
    throw;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- steady / spectrum

int cmd_steady(const ModelSource& source, const std::string& path) {
  const LindbladModel model = source.load();
  const SteadyStateReport rep = steady_state(model);
  std::cerr << "kernel_dimension: " << rep.kernel_dimension << "\n"
            << "spectral_gap: " << format_number(rep.spectral_gap) << "\n";
  if (!rep.unique()) {
    std::cerr << "degenerate kernel: no unique steady state\n";
    return kExitDegenerate;
  }
  std::cerr << "residual: " << format_number(rep.residual) << "\n"
            << "purity: " << format_number(purity(*rep.state)) << "\n";
  Output out(path);
  auto& os = out.stream();
  os << "# kernel_dimension=" << rep.kernel_dimension << "\n"
     << "# spectral_gap=" << format_number(rep.spectral_gap) << "\n"
     << "# residual=" << format_number(rep.residual) << "\n";
  io::write_matrix_csv(os, rep.state->matrix());
  return rep.contractive ? kExitOk : kExitInvariant;
}

int cmd_spectrum(const ModelSource& source, const std::string& path) {
  const SpectrumReport rep = liouvillian_spectrum(source.load());
  std::cerr << "eigenvalues: " << rep.decomposition.size() << "\n"
            << "zero_eigenvalues: " << rep.zero_eigenvalues << "\n"
            << "spectral_gap: " << format_number(rep.spectral_gap) << "\n"
            << "conjugation_closed: " << (rep.conjugation_closed ? "yes" : "no") << "\n"
            << "contractive: " << (rep.contractive ? "yes" : "no") << "\n";
  Output out(path);
  auto& os = out.stream();
  os << "re,im\n";
  for (const auto& v : rep.decomposition.eigenvalues) os << format_number(v.real()) << "," << format_number(v.imag()) << "\n";
  return rep.contractive && rep.conjugation_closed ? kExitOk : kExitInvariant;
}

// ---------------------------------------------------------------- channel

struct ChannelOptions {
  std::string action;
  std::vector<std::string> kraus;
  std::string choi;
  std::string out;
};

std::vector<ComplexMatrix> load_kraus(const std::vector<std::string>& files) {
  std::vector<ComplexMatrix> all;
  for (const auto& f : files)
    for (auto& k : io::read_kraus(f)) {
      if (!all.empty() && k.rows() != all.front().rows()) throw io::ParseError(f + ": Kraus operators differ in dimension");
      all.push_back(std::move(k));
    }
  return all;
}

ChoiMatrix load_choi(const std::string& file) {
  const ComplexMatrix m = io::read_matrix(file);
  const auto d = static_cast<Index>(std::lround(std::sqrt(static_cast<double>(m.rows()))));
  if (d * d != m.rows()) throw io::ParseError(file + ": Choi matrix size " + std::to_string(m.rows()) + " is not a square number");
  return ChoiMatrix(m, d);
}

int cmd_channel(const ChannelOptions& opt) {
  if (opt.kraus.empty() == opt.choi.empty()) throw io::ParseError("give exactly one of --kraus or --choi");
  if (opt.action == "choi" && opt.kraus.empty()) throw io::ParseError("channel choi needs --kraus");
  if (opt.action == "from-choi" && opt.choi.empty()) throw io::ParseError("channel from-choi needs --choi");

  std::optional<QuantumChannel> channel;
  if (!opt.kraus.empty()) channel.emplace(load_kraus(opt.kraus));
  const ChoiMatrix choi = channel ? choi_matrix(*channel) : load_choi(opt.choi);

  if (opt.action == "choi") {
    Output out(opt.out);
    out.stream() << io::dump({{"dim", choi.source_dim()}, {"matrix", io::matrix_to_json(choi.matrix())}});
    return kExitOk;
  }
  if (opt.action == "from-choi") {
    const QuantumChannel extracted = kraus_from_choi(choi, 1e-10);
    io::json ops = io::json::array();
    for (const auto& k : extracted.kraus()) ops.push_back(io::matrix_to_json(k));
    Output out(opt.out);
    out.stream() << io::dump({{"kraus", ops}});
    std::cerr << "kraus operators: " << extracted.kraus().size() << "\n"
              << "completeness residual: " << format_number(extracted.completeness_residual()) << "\n";
    return kExitOk;
  }

  // check
  const double residual = channel ? channel->completeness_residual() : choi.trace_preservation_residual();
  const double herm = hermiticity_residual(choi.matrix());
  const double min_eig = choi.eigenvalues()(0);
  const bool tp = residual <= kCompletenessTol;
  const bool cp = herm <= 1e-10 && min_eig >= -1e-10;
  std::cout << "dim: " << choi.source_dim() << "\n";
  if (channel) std::cout << "kraus operators: " << channel->kraus().size() << "\n";
  std::cout << "completeness residual: " << format_number(residual) << "\n"
            << "choi min eigenvalue: " << format_number(min_eig) << "\n"
            << (tp ? "trace preserving" : "NOT trace preserving") << "\n";
  if (cp) {
    std::cout << "completely positive\n";
  } else if (herm > 1e-10) {
    std::cout << "NOT completely positive: Choi matrix not Hermitian (residual " << format_number(herm) << ")\n";
  } else {
    std::cout << "NOT completely positive: Choi eigenvalue " << format_number(min_eig) << "\n";
  }
  return tp && cp ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lindblad master equation toolkit"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "check a model file");
  validate_cmd->add_option("model", validate_path, "model JSON file")->required();

  EvolveOptions evolve_opt;
  auto* evolve_cmd = app.add_subcommand("evolve", "integrate a model and write a CSV trajectory");
  evolve_opt.source.attach(evolve_cmd);
  evolve_cmd->add_option("--method", evolve_opt.method, "rk4 | cn | spectral")->capture_default_str();
  evolve_cmd->add_option("--dt", evolve_opt.dt, "step size")->capture_default_str();
  evolve_cmd->add_option("--t-max", evolve_opt.t_max, "final time")->capture_default_str();
  evolve_cmd->add_option("--record-every", evolve_opt.record_every, "write every n-th step")->capture_default_str();
  evolve_cmd->add_flag("--renormalize", evolve_opt.renormalize, "divide by the trace after each step");
  evolve_cmd->add_option("--initial", evolve_opt.initial, "excited | ground | mixed | matrix file")->capture_default_str();
  evolve_cmd->add_option("--observable", evolve_opt.observables, "pK or name=FILE (repeatable)");
  evolve_cmd->add_option("--out", evolve_opt.out, "CSV path (default stdout)");

  ModelSource steady_src;
  std::string steady_out;
  auto* steady_cmd = app.add_subcommand("steady", "steady state from the Liouvillian kernel");
  steady_src.attach(steady_cmd);
  steady_cmd->add_option("--out", steady_out, "CSV path (default stdout)");

  ModelSource spectrum_src;
  std::string spectrum_out;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Liouvillian eigenvalues");
  spectrum_src.attach(spectrum_cmd);
  spectrum_cmd->add_option("--out", spectrum_out, "CSV path (default stdout)");

  ChannelOptions channel_opt;
  auto* channel_cmd = app.add_subcommand("channel", "Kraus / Choi channel tools");
  channel_cmd->add_option("action", channel_opt.action, "check | choi | from-choi")
      ->required()
      ->check(CLI::IsMember({"check", "choi", "from-choi"}));
  channel_cmd->add_option("--kraus", channel_opt.kraus, "Kraus file(s)");
  channel_cmd->add_option("--choi", channel_opt.choi, "Choi matrix file");
  channel_cmd->add_option("--out", channel_opt.out, "JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (*validate_cmd) return cmd_validate(validate_path);
    if (*evolve_cmd) return cmd_evolve(evolve_opt);
    if (*steady_cmd) return cmd_steady(steady_src, steady_out);
    if (*spectrum_cmd) return cmd_spectrum(spectrum_src, spectrum_out);
    if (*channel_cmd) return cmd_channel(channel_opt);
  } catch (const io::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const StepDivergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const StepSolveError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DefectiveLiouvillian& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NegativeChoiError& e) {
    std::cout << "NOT completely positive: Choi eigenvalue " << format_number(e.value()) << "\n";
    return kExitInvariant;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitParse;
}

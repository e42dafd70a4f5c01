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

// Two-level atom models.
//
//   driven_tls           H = E|1><1| + Omega(|0><1| + |1><0|)
//   decaying_driven_tls  H plus spontaneous decay (Gamma, sigma-)
//   thermal_tls          H plus (Gamma(1+n), sigma-) and (Gamma n, sigma+)

#include <cmath>
#include <string>
#include <string_view>

#include "lindblad/liouville.hpp"
#include "lindblad/matrix_core.hpp"

namespace lindblad::presets {

/// sigma- = |0><1|, lowers |1> to |0>.
inline ComplexMatrix sigma_minus() { return matrix_unit(2, 0, 1); }
inline ComplexMatrix sigma_plus() { return matrix_unit(2, 1, 0); }

inline ComplexMatrix sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline ComplexMatrix sigma_y() {
  ComplexMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

inline ComplexMatrix sigma_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// |k><k| in dimension d.
inline ComplexMatrix projector(Index d, Index k) { return matrix_unit(d, k, k); }

enum class PresetName { driven_tls, decaying_driven_tls, thermal_tls };

inline const char* to_string(PresetName n) {
  switch (n) {
    case PresetName::driven_tls: return "driven_tls";
    case PresetName::decaying_driven_tls: return "decaying_driven_tls";
    case PresetName::thermal_tls: return "thermal_tls";
  }
  return "?";
}

inline PresetName parse_name(std::string_view s) {
  if (s == "driven_tls") return PresetName::driven_tls;
  if (s == "decaying_driven_tls") return PresetName::decaying_driven_tls;
  if (s == "thermal_tls") return PresetName::thermal_tls;
  throw ModelError("unknown preset '" + std::string(s) + "' (expected driven_tls, decaying_driven_tls or thermal_tls)");
}

struct PresetSpec {
  PresetName name = PresetName::driven_tls;
  double energy = 1.0;  // E
  double drive = 1.0;   // Omega
  double gamma = 0.0;   // Gamma
  double n = 0.0;       // mean thermal occupation

  void check() const {
    for (double v : {energy, drive, gamma, n})
      if (!std::isfinite(v)) throw ModelError("preset parameters must be finite");
    if (gamma < 0) throw ModelError("preset: Gamma must be non-negative");
    if (n < 0) throw ModelError("preset: n must be non-negative");
  }
};

/// E|1><1| + Omega(|0><1| + |1><0|)
inline ComplexMatrix tls_hamiltonian(double energy, double drive) {
  ComplexMatrix h(2, 2);
  h << 0, drive, drive, energy;
  return h;
}

inline LindbladModel make(const PresetSpec& spec) {
  spec.check();
  const ComplexMatrix h = tls_hamiltonian(spec.energy, spec.drive);
  std::vector<JumpOperator> jumps;
  switch (spec.name) {
    case PresetName::driven_tls:
      break;
    case PresetName::decaying_driven_tls:
      jumps.push_back({spec.gamma, sigma_minus()});
      break;
    case PresetName::thermal_tls:
      jumps.push_back({spec.gamma * (1.0 + spec.n), sigma_minus()});
      jumps.push_back({spec.gamma * spec.n, sigma_plus()});
      break;
  }
  return LindbladModel(h, std::move(jumps), to_string(spec.name));
}

inline LindbladModel driven_tls(double energy, double drive) {
  return make({PresetName::driven_tls, energy, drive, 0.0, 0.0});
}

inline LindbladModel decaying_driven_tls(double energy, double drive, double gamma) {
  return make({PresetName::decaying_driven_tls, energy, drive, gamma, 0.0});
}

inline LindbladModel thermal_tls(double energy, double drive, double gamma, double n) {
  return make({PresetName::thermal_tls, energy, drive, gamma, n});
}

}  // namespace lindblad::presets

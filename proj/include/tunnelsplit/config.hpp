#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tunnelsplit/packets.hpp"
#include "tunnelsplit/potentials.hpp"
#include "tunnelsplit/scattering.hpp"

namespace tunnelsplit {

// One scenario as read from a JSON document. Keys carry their units:
//
//   {
//     "name": "paper-barrier",
//     "potential": {"type": "rectangular", "V0_eV": 0.3, "a_nm": 500, "b_nm": 505},
//     "mass_me": 0.067,
//     "packet": {"E_avg_eV": 0.25, "l0_nm": 7.5},
//     "times_fs": [0, 400, 420],
//     "L1_nm": 0, "L2_nm": 0,
//     "grids": {"k_points": 512, "dx_nm": 0.1}
//   }
//
// Potential types: rectangular (V0_eV, a_nm, b_nm), delta (W_eVnm, a_nm),
// piecewise (a_nm, layers: [{V_eV, width_nm}, ...]) and free (a_nm, b_nm).
// The packet takes exactly one of E_avg_eV and k0_per_nm. Grid keys are
// k_min_per_nm, k_max_per_nm, k_points, x_min_nm, x_max_nm, dx_nm.
struct ScenarioConfig {
  std::string name;
  PotentialSpec potential = PotentialSpec::free(1.0, 2.0);
  double mass_me = 0.067;
  std::optional<double> E_avg_eV;
  std::optional<double> k0_per_nm;
  double l0_nm = 7.5;
  std::vector<double> times_fs;
  double L1_nm = 0.0;
  double L2_nm = 0.0;
  GridOverrides grids;

  Particle particle() const { return Particle::from_electron_masses(mass_me); }
  ScatteringSystem system() const { return {potential, particle()}; }
  double k0() const;
  double t_max() const;
};

// Throws InvalidInput on malformed documents, unknown keys or bad values.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
ScenarioConfig preset(std::string_view name);

// Canonical JSON (sorted keys, round-trip doubles) and its FNV-1a hash.
std::string to_json(const ScenarioConfig& c);
std::string scenario_hash(const ScenarioConfig& c);

}  // namespace tunnelsplit

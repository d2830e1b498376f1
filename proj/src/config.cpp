#include "tunnelsplit/config.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tunnelsplit/errors.hpp"

namespace tunnelsplit {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw InvalidInput(where + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) throw InvalidInput("unknown key '" + key + "' in " + where);
}

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InvalidInput("missing '" + std::string(key) + "' in " + where);
  const auto& v = j.at(key);
  if (!v.is_number()) throw InvalidInput("'" + std::string(key) + "' in " + where + " must be a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  return number(j, key, where);
}

PotentialSpec parse_potential(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw InvalidInput("potential needs a string 'type'");
  const auto type = j.at("type").get<std::string>();
  const std::string where = "potential";
  if (type == "rectangular") {
    only_keys(j, where, {"type", "V0_eV", "a_nm", "b_nm"});
    return PotentialSpec::rectangular(number(j, "V0_eV", where), number(j, "a_nm", where),
                                      number(j, "b_nm", where));
  }
  if (type == "free") {
    only_keys(j, where, {"type", "a_nm", "b_nm"});
    return PotentialSpec::free(number(j, "a_nm", where), number(j, "b_nm", where));
  }
  if (type == "delta") {
    only_keys(j, where, {"type", "W_eVnm", "a_nm"});
    return PotentialSpec::delta(number(j, "W_eVnm", where), number(j, "a_nm", where));
  }
  if (type == "piecewise") {
    only_keys(j, where, {"type", "a_nm", "layers"});
    if (!j.contains("layers") || !j.at("layers").is_array())
      throw InvalidInput("piecewise potential needs a 'layers' array");
    std::vector<Layer> layers;
    for (const auto& l : j.at("layers")) {
      only_keys(l, "layer", {"V_eV", "width_nm"});
      layers.push_back({number(l, "V_eV", "layer"), number(l, "width_nm", "layer")});
    }
    return PotentialSpec::piecewise(number(j, "a_nm", where), std::move(layers));
  }
  throw InvalidInput("unknown potential type '" + type + "'");
}

json potential_json(const PotentialSpec& p) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rectangular>) {
          return {{"type", "rectangular"}, {"V0_eV", v.V0}, {"a_nm", v.a}, {"b_nm", v.b}};
        } else if constexpr (std::is_same_v<T, Delta>) {
          return {{"type", "delta"}, {"W_eVnm", v.W}, {"a_nm", v.a}};
        } else {
          json layers = json::array();
          for (const auto& l : v.layers) layers.push_back({{"V_eV", l.height}, {"width_nm", l.width}});
          return {{"type", "piecewise"}, {"a_nm", v.a}, {"layers", layers}};
        }
      },
      p.variant());
}

void validate(const ScenarioConfig& c) {
  if (!(c.mass_me > 0.0)) throw InvalidInput("mass_me must be positive");
  if (c.E_avg_eV.has_value() == c.k0_per_nm.has_value())
    throw InvalidInput("packet needs exactly one of E_avg_eV and k0_per_nm");
  if (c.E_avg_eV && !(*c.E_avg_eV > 0.0)) throw InvalidInput("E_avg_eV must be positive");
  if (c.k0_per_nm && !(*c.k0_per_nm > 0.0)) throw InvalidInput("k0_per_nm must be positive");
  if (!(c.l0_nm > 0.0)) throw InvalidInput("l0_nm must be positive");
  if (c.L1_nm < 0.0 || c.L2_nm < 0.0) throw InvalidInput("L1_nm and L2_nm must be non-negative");
  for (double t : c.times_fs)
    if (!(t >= 0.0)) throw InvalidInput("times_fs must be non-negative");
  if (c.k0() * c.l0_nm < 3.0) throw InvalidInput("k0 * l0 must be at least 3");
  if (c.grids.k_points && *c.grids.k_points < 16) throw InvalidInput("k_points must be >= 16");
  if (c.grids.dx && !(*c.grids.dx > 0.0)) throw InvalidInput("dx_nm must be positive");
}

}  // namespace

double ScenarioConfig::k0() const {
  if (k0_per_nm) return *k0_per_nm;
  if (E_avg_eV) return particle().wavenumber(*E_avg_eV);
  throw InvalidInput("scenario has no packet energy or wavenumber");
}

double ScenarioConfig::t_max() const {
  return times_fs.empty() ? 0.0 : *std::max_element(times_fs.begin(), times_fs.end());
}

ScenarioConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(j, "config",
            {"name", "potential", "mass_me", "packet", "times_fs", "L1_nm", "L2_nm", "grids"});
  ScenarioConfig c;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw InvalidInput("'name' must be a string");
    c.name = j.at("name").get<std::string>();
  }
  if (!j.contains("potential")) throw InvalidInput("config needs a 'potential'");
  c.potential = parse_potential(j.at("potential"));
  if (auto m = optional_number(j, "mass_me", "config")) c.mass_me = *m;
  if (!j.contains("packet")) throw InvalidInput("config needs a 'packet'");
  const auto& p = j.at("packet");
  only_keys(p, "packet", {"E_avg_eV", "k0_per_nm", "l0_nm"});
  c.E_avg_eV = optional_number(p, "E_avg_eV", "packet");
  c.k0_per_nm = optional_number(p, "k0_per_nm", "packet");
  c.l0_nm = number(p, "l0_nm", "packet");
  if (j.contains("times_fs")) {
    if (!j.at("times_fs").is_array()) throw InvalidInput("'times_fs' must be an array");
    for (const auto& t : j.at("times_fs")) {
      if (!t.is_number()) throw InvalidInput("'times_fs' entries must be numbers");
      c.times_fs.push_back(t.get<double>());
    }
  }
  c.L1_nm = optional_number(j, "L1_nm", "config").value_or(0.0);
  c.L2_nm = optional_number(j, "L2_nm", "config").value_or(0.0);
  if (j.contains("grids")) {
    const auto& g = j.at("grids");
    only_keys(g, "grids",
              {"k_min_per_nm", "k_max_per_nm", "k_points", "x_min_nm", "x_max_nm", "dx_nm"});
    c.grids.k_min = optional_number(g, "k_min_per_nm", "grids");
    c.grids.k_max = optional_number(g, "k_max_per_nm", "grids");
    if (g.contains("k_points")) {
      if (!g.at("k_points").is_number_unsigned()) throw InvalidInput("'k_points' must be a positive integer");
      c.grids.k_points = g.at("k_points").get<std::size_t>();
    }
    c.grids.x_min = optional_number(g, "x_min_nm", "grids");
    c.grids.x_max = optional_number(g, "x_max_nm", "grids");
    c.grids.dx = optional_number(g, "dx_nm", "grids");
  }
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> preset_names() { return {"paper-barrier", "paper-well", "delta", "free"}; }

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig c;
  c.name = std::string(name);
  c.mass_me = 0.067;
  c.E_avg_eV = 0.25;
  c.l0_nm = 7.5;
  if (name == "paper-barrier") {
    c.potential = PotentialSpec::rectangular(0.3, 500.0, 505.0);
    c.times_fs = {0.0, 400.0, 420.0};
  } else if (name == "paper-well") {
    c.potential = PotentialSpec::rectangular(-0.3, 500.0, 505.0);
    c.times_fs = {0.0, 400.0, 430.0};
  } else if (name == "delta") {
    c.potential = PotentialSpec::delta(0.3, 200.0);
    c.l0_nm = 15.0;
    c.times_fs = {0.0, 150.0, 200.0};
  } else if (name == "free") {
    c.potential = PotentialSpec::free(100.0, 105.0);
    c.times_fs = {0.0, 100.0};
    c.L1_nm = 10.0;
    c.L2_nm = 10.0;
  } else {
    throw InvalidInput("unknown preset '" + std::string(name) + "'");
  }
  validate(c);
  return c;
}

std::string to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["potential"] = potential_json(c.potential);
  j["mass_me"] = c.mass_me;
  json packet = {{"l0_nm", c.l0_nm}};
  if (c.E_avg_eV) packet["E_avg_eV"] = *c.E_avg_eV;
  if (c.k0_per_nm) packet["k0_per_nm"] = *c.k0_per_nm;
  j["packet"] = packet;
  j["times_fs"] = c.times_fs;
  j["L1_nm"] = c.L1_nm;
  j["L2_nm"] = c.L2_nm;
  json g = json::object();
  if (c.grids.k_min) g["k_min_per_nm"] = *c.grids.k_min;
  if (c.grids.k_max) g["k_max_per_nm"] = *c.grids.k_max;
  if (c.grids.k_points) g["k_points"] = *c.grids.k_points;
  if (c.grids.x_min) g["x_min_nm"] = *c.grids.x_min;
  if (c.grids.x_max) g["x_max_nm"] = *c.grids.x_max;
  if (c.grids.dx) g["dx_nm"] = *c.grids.dx;
  if (!g.empty()) j["grids"] = g;
  return j.dump();
}

std::string scenario_hash(const ScenarioConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : to_json(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str().substr(0, 12);
}

}  // namespace tunnelsplit

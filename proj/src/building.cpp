#include "thermoarena/building.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "thermoarena/config.hpp"
#include "thermoarena/errors.hpp"

namespace thermoarena::building {

namespace {

constexpr int kSchemaVersion = 1;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Occupancy parse_occupancy(const std::string& s, const std::string& field) {
  if (s == "office") return Occupancy::office;
  if (s == "constant") return Occupancy::constant;
  throw ConfigError(field, "expected 'office' or 'constant', got '" + s + "'");
}

const char* to_string(Occupancy o) { return o == Occupancy::office ? "office" : "constant"; }

void require_positive(double v, const std::string& what, const std::string& zone) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(zone + "." + what, "must be > 0");
}

}  // namespace

void ZoneParams::validate() const {
  require_positive(capacitance, "capacitance_j_per_c", name);
  require_positive(envelope_resistance, "envelope_resistance_c_per_w", name);
  require_positive(heating_capacity, "heating_capacity_w", name);
  require_positive(cooling_capacity, "cooling_capacity_w", name);
  require_positive(heating_cop, "heating_cop", name);
  require_positive(cooling_cop, "cooling_cop", name);
  if (!(internal_gain >= 0.0)) throw ConfigError(name + ".internal_gain_w", "must be >= 0");
  if (!(solar_aperture >= 0.0)) throw ConfigError(name + ".solar_aperture_m2", "must be >= 0");
  if (!(occupants >= 0.0)) throw ConfigError(name + ".occupants", "must be >= 0");
  if (action_index < 0) throw ConfigError(name + ".action_index", "must be >= 0");
}

Preset parse_preset(const std::string& id) {
  if (id == "five_zone") return Preset::five_zone;
  if (id == "two_zone_datacenter") return Preset::two_zone_datacenter;
  throw UnknownPreset(id);
}

std::string to_string(Preset p) { return p == Preset::five_zone ? "five_zone" : "two_zone_datacenter"; }

int BuildingModel::num_action_pairs() const {
  int n = 0;
  for (const auto& z : zones) n = std::max(n, z.action_index + 1);
  return n;
}

int BuildingModel::zone_index(const std::string& name) const {
  for (int i = 0; i < num_zones(); ++i)
    if (zones[i].name == name) return i;
  return -1;
}

void BuildingModel::validate() const {
  if (zones.empty()) throw ConfigError("zones", "building has no zones");
  const int expected = preset_id == Preset::five_zone ? 5 : 2;
  if (num_zones() != expected)
    throw ConfigError("zones", to_string(preset_id) + " needs exactly " + std::to_string(expected) + " zones");
  for (const auto& z : zones) z.validate();
  for (const auto& [key, r] : coupling_resistances) {
    const auto [i, j] = key;
    if (i < 0 || j < 0 || i >= num_zones() || j >= num_zones() || i >= j)
      throw ConfigError("coupling_c_per_w", "coupling references an unknown zone pair");
    if (!(r > 0.0)) throw ConfigError("coupling_c_per_w", "resistances must be > 0");
  }
  if (!(solar_absorptance >= 0.0 && solar_absorptance <= 1.0))
    throw ConfigError("solar_absorptance", "must lie in [0, 1]");
}

double BuildingModel::max_electric_power() const {
  double total = 0.0;
  for (const auto& z : zones)
    total += std::max(z.heating_capacity / z.heating_cop, z.cooling_capacity / z.cooling_cop);
  return total;
}

std::string default_data_dir() {
  if (const char* env = std::getenv("THERMOARENA_DATA"); env && *env) return env;
  return THERMOARENA_DATA_DIR;
}

BuildingModel parse_building(const std::string& ini_text) {
  const auto tree = config::parse_ini(ini_text, "building");
  BuildingModel m;
  m.schema_version = config::get<int>(tree, "schema_version");
  if (m.schema_version != kSchemaVersion)
    throw ConfigError("schema_version", "unsupported building schema " + std::to_string(m.schema_version));
  m.preset_id = parse_preset(config::get<std::string>(tree, "preset_id"));
  m.solar_absorptance = config::get_or<double>(tree, "solar_absorptance", 0.6);

  const auto names = split_list(config::get<std::string>(tree, "zones"));
  for (const auto& name : names) {
    const auto section = tree.get_child_optional(name);
    if (!section) throw ConfigError(name, "zone section missing");
    config::reject_unknown(tree, name,
                           {"capacitance_j_per_c", "envelope_resistance_c_per_w", "internal_gain_w", "occupancy",
                            "occupants", "solar_aperture_m2", "heating_capacity_w", "cooling_capacity_w",
                            "heating_cop", "cooling_cop", "action_index"});
    ZoneParams z;
    z.name = name;
    const auto key = [&](const char* k) { return name + "." + k; };
    z.capacitance = config::get<double>(tree, key("capacitance_j_per_c"));
    z.envelope_resistance = config::get<double>(tree, key("envelope_resistance_c_per_w"));
    z.internal_gain = config::get<double>(tree, key("internal_gain_w"));
    z.occupancy = parse_occupancy(config::get<std::string>(tree, key("occupancy")), key("occupancy"));
    z.occupants = config::get_or<double>(tree, key("occupants"), 0.0);
    z.solar_aperture = config::get<double>(tree, key("solar_aperture_m2"));
    z.heating_capacity = config::get<double>(tree, key("heating_capacity_w"));
    z.cooling_capacity = config::get<double>(tree, key("cooling_capacity_w"));
    z.heating_cop = config::get<double>(tree, key("heating_cop"));
    z.cooling_cop = config::get<double>(tree, key("cooling_cop"));
    z.action_index = config::get_or<int>(tree, key("action_index"), 0);
    m.zones.push_back(z);
  }

  if (const auto coupling = tree.get_child_optional("coupling_c_per_w")) {
    for (const auto& [pair, value] : *coupling) {
      const auto dash = pair.find('-');
      const int a = dash == std::string::npos ? -1 : m.zone_index(pair.substr(0, dash));
      const int b = dash == std::string::npos ? -1 : m.zone_index(pair.substr(dash + 1));
      if (a < 0 || b < 0 || a == b)
        throw ConfigError("coupling_c_per_w." + pair, "expected '<zone>-<zone>' naming two distinct zones");
      m.coupling_resistances[{std::min(a, b), std::max(a, b)}] =
          config::get<double>(tree, "coupling_c_per_w." + pair);
    }
  }
  m.validate();
  return m;
}

std::string write_building(const BuildingModel& m) {
  std::ostringstream out;
  out << "schema_version = " << m.schema_version << "\n";
  out << "preset_id = " << to_string(m.preset_id) << "\n";
  out << "solar_absorptance = " << m.solar_absorptance << "\n";
  out << "zones = ";
  for (int i = 0; i < m.num_zones(); ++i) out << (i ? "," : "") << m.zones[i].name;
  out << "\n";
  for (const auto& z : m.zones) {
    out << "\n[" << z.name << "]\n"
        << "capacitance_j_per_c = " << z.capacitance << "\n"
        << "envelope_resistance_c_per_w = " << z.envelope_resistance << "\n"
        << "internal_gain_w = " << z.internal_gain << "\n"
        << "occupancy = " << to_string(z.occupancy) << "\n"
        << "occupants = " << z.occupants << "\n"
        << "solar_aperture_m2 = " << z.solar_aperture << "\n"
        << "heating_capacity_w = " << z.heating_capacity << "\n"
        << "cooling_capacity_w = " << z.cooling_capacity << "\n"
        << "heating_cop = " << z.heating_cop << "\n"
        << "cooling_cop = " << z.cooling_cop << "\n"
        << "action_index = " << z.action_index << "\n";
  }
  if (!m.coupling_resistances.empty()) {
    out << "\n[coupling_c_per_w]\n";
    for (const auto& [key, r] : m.coupling_resistances)
      out << m.zones[key.first].name << "-" << m.zones[key.second].name << " = " << r << "\n";
  }
  return out.str();
}

BuildingModel load_building(const std::string& preset_id, const std::string& data_dir) {
  return load_building(parse_preset(preset_id), data_dir);
}

BuildingModel load_building(Preset preset, const std::string& data_dir) {
  const auto path = std::filesystem::path(data_dir) / "buildings" / (to_string(preset) + ".ini");
  const auto tree_text = [&] {
    std::ifstream in(path);
    if (!in) throw ConfigError("building", "preset file not found: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }();
  auto model = parse_building(tree_text);
  if (model.preset_id != preset) throw ConfigError("preset_id", "file " + path.string() + " declares another preset");
  return model;
}

ZoneState ZoneState::uniform(int zones, double temp) {
  ZoneState s;
  s.temperatures.assign(zones, temp);
  s.last_hvac_thermal.assign(zones, 0.0);
  return s;
}

double hvac_thermal(double zone_temp, double heating_sp, double cooling_sp, const ZoneParams& params) {
  if (!(heating_sp < cooling_sp))
    throw InvalidSetpoints("heating setpoint " + std::to_string(heating_sp) + " must be below cooling setpoint " +
                           std::to_string(cooling_sp));
  if (zone_temp < heating_sp) return std::min(params.heating_capacity, params.heating_gain() * (heating_sp - zone_temp));
  if (zone_temp > cooling_sp)
    return -std::min(params.cooling_capacity, params.cooling_gain() * (zone_temp - cooling_sp));
  return 0.0;
}

double occupancy_fraction(Occupancy occ, const Timestamp& ts) {
  if (occ == Occupancy::constant) return 1.0;
  const bool weekday = ts.iso_weekday() <= 5;
  const bool hours = ts.hour >= 8 && ts.hour < 18;
  return weekday && hours ? 1.0 : 0.1;
}

StepResult step_building(const ZoneState& state, const BuildingModel& model, const std::vector<SetpointPair>& actions,
                         const weather::WeatherTick& tick, double dt, bool hvac_enabled) {
  if (!(dt > 0.0)) throw Error("step_building: dt must be positive");
  const int n = model.num_zones();
  if (static_cast<int>(state.temperatures.size()) != n) throw ShapeMismatch("zone state does not match building");
  if (static_cast<int>(actions.size()) != model.num_action_pairs())
    throw ShapeMismatch("expected " + std::to_string(model.num_action_pairs()) + " setpoint pairs, got " +
                        std::to_string(actions.size()));

  const auto& T = state.temperatures;
  const double solar = tick.direct_solar + tick.diffuse_solar;

  StepResult out;
  out.state.temperatures.resize(n);
  out.state.last_hvac_thermal.assign(n, 0.0);
  std::vector<double> flux(n, 0.0);
  for (const auto& [key, r] : model.coupling_resistances) {
    const double q = (T[key.second] - T[key.first]) / r;
    flux[key.first] += q;
    flux[key.second] -= q;
  }

  double electric = 0.0;
  for (int z = 0; z < n; ++z) {
    const auto& p = model.zones[z];
    double q_hvac = 0.0;
    if (hvac_enabled) {
      const auto& sp = actions[p.action_index];
      q_hvac = hvac_thermal(T[z], sp.heating, sp.cooling, p);
      electric += q_hvac > 0.0 ? q_hvac / p.heating_cop : -q_hvac / p.cooling_cop;
    }
    const double q_int = p.internal_gain * occupancy_fraction(p.occupancy, tick.timestamp);
    const double q_sun = p.solar_aperture * solar * model.solar_absorptance;
    const double q_env = (tick.drybulb_temp - T[z]) / p.envelope_resistance;
    out.state.temperatures[z] = T[z] + dt / p.capacitance * (q_env + flux[z] + q_int + q_sun + q_hvac);
    out.state.last_hvac_thermal[z] = q_hvac;
  }
  out.state.last_electric_power = electric;
  out.electric_power = electric;
  return out;
}

}  // namespace thermoarena::building

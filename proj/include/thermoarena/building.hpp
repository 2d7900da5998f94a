#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "thermoarena/weather.hpp"

namespace thermoarena::building {

enum class Occupancy {
  office,    // weekdays 08:00-18:00 at full gain, otherwise 10 %
  constant,  // always full gain (IT load)
};

/// Lumped RC parameters and HVAC abstraction of one thermal zone.
struct ZoneParams {
  std::string name;
  double capacitance = 6.0e6;          // J/degC
  double envelope_resistance = 0.006;  // degC/W
  double internal_gain = 1000.0;       // W at full occupancy
  Occupancy occupancy = Occupancy::office;
  double occupants = 0.0;              // people at full occupancy
  double solar_aperture = 0.0;         // m2 of effective glazing
  double heating_capacity = 8000.0;    // W thermal
  double cooling_capacity = 8000.0;    // W thermal
  double heating_cop = 0.95;
  double cooling_cop = 3.0;
  int action_index = 0;                // which setpoint pair drives this zone

  void validate() const;
  /// Thermal power of the proportional thermostat per degC of setpoint error.
  double heating_gain() const { return heating_capacity / kProportionalBand; }
  double cooling_gain() const { return cooling_capacity / kProportionalBand; }

  static constexpr double kProportionalBand = 2.0;  // degC of violation for full output
};

enum class Preset { five_zone, two_zone_datacenter };

Preset parse_preset(const std::string& id);
std::string to_string(Preset p);

struct BuildingModel {
  Preset preset_id = Preset::five_zone;
  int schema_version = 1;
  std::vector<ZoneParams> zones;
  /// Keyed by (i, j) with i < j.
  std::map<std::pair<int, int>, double> coupling_resistances;
  double solar_absorptance = 0.6;

  int num_zones() const { return static_cast<int>(zones.size()); }
  int num_action_pairs() const;
  int zone_index(const std::string& name) const;
  void validate() const;

  /// Sum over zones of the largest electric draw the HVAC can produce.
  double max_electric_power() const;
};

/// `$THERMOARENA_DATA` if set, else the source tree's data/ directory.
std::string default_data_dir();

/// Load a preset from `<data_dir>/buildings/<id>.ini`.
BuildingModel load_building(const std::string& preset_id, const std::string& data_dir = default_data_dir());
BuildingModel load_building(Preset preset, const std::string& data_dir = default_data_dir());
BuildingModel parse_building(const std::string& ini_text);
std::string write_building(const BuildingModel& model);

struct ZoneState {
  std::vector<double> temperatures;       // degC
  std::vector<double> last_hvac_thermal;  // W, + heating / - cooling
  double last_electric_power = 0.0;       // W, building total

  static ZoneState uniform(int zones, double temp);
  bool operator==(const ZoneState&) const = default;
};

struct SetpointPair {
  double heating = 20.0;
  double cooling = 23.5;
  bool operator==(const SetpointPair&) const = default;
};

/// Idealized thermostat. Positive output heats, negative cools, zero inside the deadband.
double hvac_thermal(double zone_temp, double heating_sp, double cooling_sp, const ZoneParams& params);

/// Fraction of full internal gain active at `ts`.
double occupancy_fraction(Occupancy occ, const Timestamp& ts);

struct StepResult {
  ZoneState state;
  double electric_power = 0.0;  // W
};

/// One explicit-Euler step of the RC network.
StepResult step_building(const ZoneState& state, const BuildingModel& model, const std::vector<SetpointPair>& actions,
                         const weather::WeatherTick& tick, double dt, bool hvac_enabled = true);

}  // namespace thermoarena::building

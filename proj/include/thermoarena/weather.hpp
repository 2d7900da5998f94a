#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "thermoarena/calendar.hpp"

namespace thermoarena::weather {

/// Outdoor conditions at one simulation step.
struct WeatherTick {
  Timestamp timestamp;
  double drybulb_temp = 0.0;      // degC
  double relative_humidity = 0.0; // %, [0, 100]
  double wind_speed = 0.0;        // m/s
  double wind_direction = 0.0;    // deg, [0, 360)
  double diffuse_solar = 0.0;     // W/m2
  double direct_solar = 0.0;      // W/m2

  bool operator==(const WeatherTick&) const = default;
};

/// A uniformly stepped series of ticks, usually one year.
struct WeatherSeries {
  std::vector<WeatherTick> ticks;
  int step_seconds = 3600;

  std::size_t size() const { return ticks.size(); }
  bool empty() const { return ticks.empty(); }
  const WeatherTick& operator[](std::size_t i) const { return ticks[i]; }

  double mean_drybulb() const;
  double mean_humidity() const;
};

enum class Climate { hot_dry, mixed_humid, cool_marine };

/// Parametric description of a climate used by the synthesizer.
struct ClimateProfile {
  std::string name;
  double mean_annual_temp = 15.0;   // degC
  double mean_annual_rh = 50.0;     // %
  double seasonal_amplitude = 10.0; // degC, half of summer-winter swing
  double diurnal_amplitude = 5.0;   // degC, half of day-night swing
  double noise_sd = 1.5;            // degC, day-to-day weather noise
  double peak_direct_solar = 700.0; // W/m2 at solar noon, midsummer
  double peak_diffuse_solar = 150.0;
  double mean_wind_speed = 3.5;     // m/s
};

ClimateProfile preset(Climate c);
Climate parse_climate(std::string_view name);  // accepts hot_dry/hot, mixed_humid/mixed, cool_marine/cool
std::string_view to_string(Climate c);
inline constexpr Climate kAllClimates[] = {Climate::cool_marine, Climate::mixed_humid, Climate::hot_dry};

/// Discrete-time Ornstein-Uhlenbeck parameters.
struct OuParams {
  double sigma = 1.0;
  double mu = 0.0;
  double tau = 0.001;  // mean reversion per step, (0, 1]

  void validate() const;
};

/// Parse an EnergyPlus weather file. Returns the hourly series as stored.
WeatherSeries parse_epw(std::string_view raw_text);
WeatherSeries read_epw_file(const std::string& path);

/// Minimal EPW writer; round-trips every field parse_epw extracts.
std::string write_epw(const WeatherSeries& series, std::string_view location = "Synthetic");

/// Linear interpolation of an hourly series to `steps_per_hour` sub-steps.
/// The last hour interpolates towards the first tick (the year wraps).
WeatherSeries resample(const WeatherSeries& hourly, int steps_per_hour);

/// One year (2021, 35040 ticks) at 15-minute resolution.
WeatherSeries synthesize_climate(const ClimateProfile& profile, std::uint64_t seed);

/// Returns a copy with drybulb offset by a seeded OU path started at zero.
WeatherSeries ou_perturb(const WeatherSeries& series, const OuParams& params, std::uint64_t seed);

/// The OU path itself; `ou_perturb` adds exactly this to drybulb.
std::vector<double> ou_path(std::size_t n, const OuParams& params, std::uint64_t seed);

/// Native CSV form: `timestamp,drybulb_c,rh_pct,wind_ms,wind_deg,diffuse_wm2,direct_wm2`.
std::string to_csv(const WeatherSeries& series);
WeatherSeries from_csv(std::string_view text);

inline constexpr int kSimulationYear = 2021;
inline constexpr int kStepSeconds = 900;

}  // namespace thermoarena::weather

#include "thermoarena/weather.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "thermoarena/errors.hpp"

namespace thermoarena::weather {

namespace {

constexpr std::size_t kEpwHeaderLines = 8;
constexpr std::size_t kEpwMinFields = 35;

// EPW data row columns (0-based).
constexpr std::size_t kColYear = 0;
constexpr std::size_t kColMonth = 1;
constexpr std::size_t kColDay = 2;
constexpr std::size_t kColHour = 3;
constexpr std::size_t kColDrybulb = 6;
constexpr std::size_t kColRh = 8;
constexpr std::size_t kColDirectNormal = 14;
constexpr std::size_t kColDiffuse = 15;
constexpr std::size_t kColWindDir = 20;
constexpr std::size_t kColWindSpeed = 21;

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view field, std::size_t row, std::size_t column) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
    throw NonNumericField(row, column, std::string(field));
  return value;
}

std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double clamp_rh(double rh) { return std::clamp(rh, 0.0, 100.0); }

double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0) w += 360.0;
  return w >= 360.0 ? 0.0 : w;
}

/// Daily AR(1) knots linearly interpolated to `n` steps of `steps_per_day`.
std::vector<double> smooth_noise(std::size_t n, int steps_per_day, double sd, double rho, std::mt19937_64& rng) {
  std::vector<double> out(n, 0.0);
  if (sd == 0.0) return out;
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t knots = n / static_cast<std::size_t>(steps_per_day) + 2;
  std::vector<double> k(knots);
  const double innov = sd * std::sqrt(1.0 - rho * rho);
  k[0] = sd * normal(rng);
  for (std::size_t i = 1; i < knots; ++i) k[i] = rho * k[i - 1] + innov * normal(rng);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t day = t / steps_per_day;
    const double frac = static_cast<double>(t % steps_per_day) / steps_per_day;
    out[t] = (1.0 - frac) * k[day] + frac * k[day + 1];
  }
  return out;
}

}  // namespace

double WeatherSeries::mean_drybulb() const {
  double s = 0.0;
  for (const auto& t : ticks) s += t.drybulb_temp;
  return ticks.empty() ? 0.0 : s / static_cast<double>(ticks.size());
}

double WeatherSeries::mean_humidity() const {
  double s = 0.0;
  for (const auto& t : ticks) s += t.relative_humidity;
  return ticks.empty() ? 0.0 : s / static_cast<double>(ticks.size());
}

ClimateProfile preset(Climate c) {
  switch (c) {
    case Climate::hot_dry:
      return {"hot_dry", 21.7, 34.9, 10.0, 8.0, 1.5, 850.0, 120.0, 3.5};
    case Climate::mixed_humid:
      return {"mixed_humid", 12.6, 68.5, 12.5, 4.0, 2.5, 600.0, 160.0, 5.0};
    case Climate::cool_marine:
      return {"cool_marine", 9.3, 81.1, 5.5, 4.0, 1.5, 500.0, 170.0, 4.0};
  }
  throw Error("unreachable climate");
}

Climate parse_climate(std::string_view name) {
  if (name == "hot_dry" || name == "hot") return Climate::hot_dry;
  if (name == "mixed_humid" || name == "mixed") return Climate::mixed_humid;
  if (name == "cool_marine" || name == "cool") return Climate::cool_marine;
  throw ConfigError("climate", "unknown climate '" + std::string(name) + "' (expected hot_dry, mixed_humid or cool_marine)");
}

std::string_view to_string(Climate c) {
  switch (c) {
    case Climate::hot_dry: return "hot_dry";
    case Climate::mixed_humid: return "mixed_humid";
    case Climate::cool_marine: return "cool_marine";
  }
  return "?";
}

void OuParams::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("stochastic_weather.sigma", "must be >= 0");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("stochastic_weather.tau", "must lie in (0, 1]");
  if (!std::isfinite(mu)) throw ConfigError("stochastic_weather.mu", "must be finite");
}

WeatherSeries parse_epw(std::string_view raw_text) {
  const auto lines = lines_of(raw_text);
  if (lines.empty() || trim(lines.front()).substr(0, 8) != "LOCATION")
    throw MalformedHeader("EPW input must start with a LOCATION header line");
  if (lines.size() < kEpwHeaderLines) throw MalformedHeader("EPW input has fewer than 8 header lines");

  WeatherSeries series;
  series.step_seconds = 3600;
  series.ticks.reserve(lines.size() - kEpwHeaderLines);
  int year = 0;
  for (std::size_t i = kEpwHeaderLines; i < lines.size(); ++i) {
    const std::size_t row = i + 1;  // 1-based line number
    const auto fields = split(lines[i], ',');
    if (fields.size() < kEpwMinFields) throw ShortRow(row, fields.size(), kEpwMinFields);
    auto num = [&](std::size_t col) { return to_double(fields[col], row, col + 1); };

    if (series.ticks.empty()) year = static_cast<int>(num(kColYear));
    WeatherTick t;
    t.timestamp = {year, static_cast<int>(num(kColMonth)), static_cast<int>(num(kColDay)),
                   static_cast<int>(num(kColHour)) - 1, 0};
    t.drybulb_temp = num(kColDrybulb);
    t.relative_humidity = clamp_rh(num(kColRh));
    t.direct_solar = std::max(0.0, num(kColDirectNormal));
    t.diffuse_solar = std::max(0.0, num(kColDiffuse));
    t.wind_direction = wrap_degrees(num(kColWindDir));
    t.wind_speed = std::max(0.0, num(kColWindSpeed));
    series.ticks.push_back(t);
  }
  return series;
}

WeatherSeries read_epw_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("weather_file", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_epw(ss.str());
}

std::string write_epw(const WeatherSeries& series, std::string_view location) {
  std::ostringstream out;
  out << "LOCATION," << location << ",-,-,Synthetic,000000,0.0,0.0,0.0,0.0\n"
      << "DESIGN CONDITIONS,0\n"
      << "TYPICAL/EXTREME PERIODS,0\n"
      << "GROUND TEMPERATURES,0\n"
      << "HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0\n"
      << "COMMENTS 1,written by thermoarena\n"
      << "COMMENTS 2,\n"
      << "DATA PERIODS,1,1,Data,Friday,1/1,12/31\n";
  for (const auto& t : series.ticks) {
    const auto& ts = t.timestamp;
    out << ts.year << ',' << ts.month << ',' << ts.day << ',' << ts.hour + 1 << ",60,?9?9?9?9E0?9?9?9,"
        << fmt(t.drybulb_temp) << ",99.9," << fmt(t.relative_humidity) << ",999999,9999,9999,9999,9999,"
        << fmt(t.direct_solar) << ',' << fmt(t.diffuse_solar) << ",999999,999999,999999,9999,"
        << fmt(t.wind_direction) << ',' << fmt(t.wind_speed)
        << ",99,99,9999,99999,9,999999999,999,0.999,999,99,999,0,99\n";
  }
  return out.str();
}

WeatherSeries resample(const WeatherSeries& hourly, int steps_per_hour) {
  if (steps_per_hour <= 0) throw Error("steps_per_hour must be positive");
  WeatherSeries out;
  out.step_seconds = hourly.step_seconds / steps_per_hour;
  const std::size_t n = hourly.size();
  out.ticks.reserve(n * steps_per_hour);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = hourly[i];
    const auto& b = hourly[(i + 1) % n];
    for (int k = 0; k < steps_per_hour; ++k) {
      const double f = static_cast<double>(k) / steps_per_hour;
      auto lerp = [f](double x, double y) { return x + f * (y - x); };
      WeatherTick t;
      t.timestamp = a.timestamp.plus_seconds(static_cast<std::int64_t>(k) * out.step_seconds);
      t.drybulb_temp = lerp(a.drybulb_temp, b.drybulb_temp);
      t.relative_humidity = clamp_rh(lerp(a.relative_humidity, b.relative_humidity));
      t.wind_speed = lerp(a.wind_speed, b.wind_speed);
      // shortest arc between directions
      double delta = b.wind_direction - a.wind_direction;
      if (delta > 180.0) delta -= 360.0;
      if (delta < -180.0) delta += 360.0;
      t.wind_direction = wrap_degrees(a.wind_direction + f * delta);
      t.diffuse_solar = lerp(a.diffuse_solar, b.diffuse_solar);
      t.direct_solar = lerp(a.direct_solar, b.direct_solar);
      out.ticks.push_back(t);
    }
  }
  return out;
}

WeatherSeries synthesize_climate(const ClimateProfile& profile, std::uint64_t seed) {
  constexpr int steps_per_day = 86400 / kStepSeconds;
  constexpr std::size_t n = 365 * steps_per_day;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  std::mt19937_64 rng(seed);
  auto temp_noise = smooth_noise(n, steps_per_day, profile.noise_sd, 0.7, rng);
  auto rh_noise = smooth_noise(n, steps_per_day, profile.noise_sd > 0 ? 4.0 : 0.0, 0.6, rng);
  auto wind_noise = smooth_noise(n, steps_per_day / 4, profile.noise_sd > 0 ? 1.2 : 0.0, 0.5, rng);
  auto dir_walk = smooth_noise(n, steps_per_day, profile.noise_sd > 0 ? 90.0 : 0.0, 0.9, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> clearness(366);
  for (auto& c : clearness) c = profile.noise_sd > 0 ? 0.55 + 0.45 * unit(rng) : 1.0;

  // Noise is demeaned so the annual mean equals the profile mean.
  double noise_mean = 0.0;
  for (double v : temp_noise) noise_mean += v;
  noise_mean /= static_cast<double>(n);
  for (auto& v : temp_noise) v -= noise_mean;

  const double rh_swing = std::min(0.3 * profile.mean_annual_rh, 0.6 * (100.0 - profile.mean_annual_rh));
  const Timestamp start{kSimulationYear, 1, 1, 0, 0};

  WeatherSeries s;
  s.step_seconds = kStepSeconds;
  s.ticks.resize(n);
  std::vector<double> rh_raw(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double day = static_cast<double>(t) / steps_per_day;
    const double hour = static_cast<double>(t % steps_per_day) * 24.0 / steps_per_day;
    const double diurnal_phase = std::cos(two_pi * (hour - 3.0) / 24.0);  // +1 at 03:00
    const double season = std::cos(two_pi * (day - 20.0) / 365.0);        // +1 mid-January

    auto& tick = s.ticks[t];
    tick.timestamp = start.plus_seconds(static_cast<std::int64_t>(t) * kStepSeconds);
    tick.drybulb_temp = profile.mean_annual_temp - profile.seasonal_amplitude * season -
                        profile.diurnal_amplitude * diurnal_phase + temp_noise[t];
    rh_raw[t] = profile.mean_annual_rh + rh_swing * diurnal_phase + rh_noise[t];

    const double winter = std::cos(two_pi * (day + 10.0) / 365.0);  // +1 at the winter solstice
    const double day_length = 12.0 - 2.5 * winter;
    const double sunrise = 12.0 - day_length / 2.0;
    const double x = (hour - sunrise) / day_length;
    const double elevation = (x > 0.0 && x < 1.0) ? std::sin(std::numbers::pi * x) : 0.0;
    const double intensity = 0.65 - 0.35 * winter;
    const double clear = clearness[static_cast<std::size_t>(day)];
    tick.direct_solar = profile.peak_direct_solar * intensity * clear * elevation;
    tick.diffuse_solar = profile.peak_diffuse_solar * (1.3 - 0.5 * clear) * elevation;

    tick.wind_speed = std::max(0.0, profile.mean_wind_speed * (1.0 + 0.3 * std::sin(two_pi * (hour - 8.0) / 24.0)) +
                                        wind_noise[t]);
    tick.wind_direction = wrap_degrees(225.0 + dir_walk[t]);
  }

  // Clamp humidity, then shift until the clamped mean hits the target.
  for (int iter = 0; iter < 50; ++iter) {
    double mean = 0.0;
    for (std::size_t t = 0; t < n; ++t) mean += clamp_rh(rh_raw[t]);
    mean /= static_cast<double>(n);
    const double shift = profile.mean_annual_rh - mean;
    if (std::abs(shift) < 1e-9) break;
    for (auto& v : rh_raw) v += shift;
  }
  for (std::size_t t = 0; t < n; ++t) s.ticks[t].relative_humidity = clamp_rh(rh_raw[t]);
  return s;
}

std::vector<double> ou_path(std::size_t n, const OuParams& params, std::uint64_t seed) {
  params.validate();
  std::vector<double> x(n, 0.0);
  if (n == 0) return x;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = params.sigma * std::sqrt(params.tau);
  for (std::size_t t = 0; t + 1 < n; ++t)
    x[t + 1] = (1.0 - params.tau) * x[t] + params.tau * params.mu + scale * normal(rng);
  return x;
}

WeatherSeries ou_perturb(const WeatherSeries& series, const OuParams& params, std::uint64_t seed) {
  if (series.empty()) throw Error("ou_perturb: empty series");
  WeatherSeries out = series;
  const auto x = ou_path(series.size(), params, seed);
  for (std::size_t t = 0; t < out.size(); ++t) {
    out.ticks[t].drybulb_temp += x[t];
    out.ticks[t].relative_humidity = clamp_rh(out.ticks[t].relative_humidity);
  }
  return out;
}

std::string to_csv(const WeatherSeries& series) {
  std::ostringstream out;
  out << "timestamp,drybulb_c,rh_pct,wind_ms,wind_deg,diffuse_wm2,direct_wm2\n";
  for (const auto& t : series.ticks)
    out << t.timestamp.to_string() << ',' << fmt(t.drybulb_temp) << ',' << fmt(t.relative_humidity) << ','
        << fmt(t.wind_speed) << ',' << fmt(t.wind_direction) << ',' << fmt(t.diffuse_solar) << ','
        << fmt(t.direct_solar) << '\n';
  return out.str();
}

WeatherSeries from_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != "timestamp,drybulb_c,rh_pct,wind_ms,wind_deg,diffuse_wm2,direct_wm2")
    throw MalformedHeader("weather CSV header mismatch");
  WeatherSeries s;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 7) throw ShortRow(i + 1, f.size(), 7);
    WeatherTick t;
    t.timestamp = Timestamp::parse(std::string(f[0]));
    t.drybulb_temp = to_double(f[1], i + 1, 2);
    t.relative_humidity = to_double(f[2], i + 1, 3);
    t.wind_speed = to_double(f[3], i + 1, 4);
    t.wind_direction = to_double(f[4], i + 1, 5);
    t.diffuse_solar = to_double(f[5], i + 1, 6);
    t.direct_solar = to_double(f[6], i + 1, 7);
    s.ticks.push_back(t);
  }
  if (s.size() >= 2)
    s.step_seconds = static_cast<int>((s[1].timestamp.to_sys() - s[0].timestamp.to_sys()).count());
  return s;
}

}  // namespace thermoarena::weather

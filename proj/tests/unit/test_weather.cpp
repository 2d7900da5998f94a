#include <doctest.h>

#include <cmath>
#include <string>

#include "thermoarena/errors.hpp"
#include "thermoarena/weather.hpp"

using namespace thermoarena;
using namespace thermoarena::weather;

namespace {

const char* const kHeader =
    "LOCATION,Tucson,AZ,USA,TMY3,722740,32.13,-110.95,-7.0,779.0\n"
    "DESIGN CONDITIONS,0\n"
    "TYPICAL/EXTREME PERIODS,0\n"
    "GROUND TEMPERATURES,0\n"
    "HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0\n"
    "COMMENTS 1,fixture\n"
    "COMMENTS 2,\n"
    "DATA PERIODS,1,1,Data,Sunday,1/1,12/31\n";

// year,month,day,hour,minute,flags,drybulb,dewpoint,rh,pressure,...,direct(14),diffuse(15),...,wind dir(20),wind speed(21)
std::string row(const std::string& drybulb, int hour = 1, const std::string& rh = "34") {
  return "1999,1,1," + std::to_string(hour) + ",60,?9?9?9?9E0?9?9?9," + drybulb + ",-3.0," + rh +
         ",92700,0,1415,260,0,0,0,0,0,0,0,350,2.1,0,0,16.1,77777,9,999999999,0,0.0,0,88,0.000,0.0,0.0\n";
}

double sample_variance(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST_CASE("parse_epw reads the standard field positions of a hand-built fixture") {
  const auto series = parse_epw(std::string(kHeader) + row("21.7", 1) + row("+5.5", 2, "101"));
  REQUIRE(series.size() == 2);
  CHECK(series[0].drybulb_temp == 21.7);
  CHECK(series[0].relative_humidity == 34.0);
  CHECK(series[0].wind_direction == 350.0);
  CHECK(series[0].wind_speed == 2.1);
  CHECK(series[0].timestamp == Timestamp{1999, 1, 1, 0, 0});
  CHECK(series[1].drybulb_temp == 5.5);
  CHECK(series[1].relative_humidity == 100.0);  // clamped
  CHECK(series[1].timestamp == Timestamp{1999, 1, 1, 1, 0});
}

TEST_CASE("parse_epw error paths") {
  CHECK_THROWS_AS(parse_epw(""), MalformedHeader);
  CHECK_THROWS_AS(parse_epw("DESIGN CONDITIONS,0\n"), MalformedHeader);
  CHECK_THROWS_AS(parse_epw("LOCATION,x\n"), MalformedHeader);

  try {
    parse_epw(std::string(kHeader) + row("1.0") + "1999,1,1,2,60,x,3.0\n");
    FAIL("expected ShortRow");
  } catch (const ShortRow& e) {
    CHECK(e.row == 10);
  }
  try {
    parse_epw(std::string(kHeader) + row("warm"));
    FAIL("expected NonNumericField");
  } catch (const NonNumericField& e) {
    CHECK(e.row == 9);
    CHECK(e.column == 7);
  }
}

TEST_CASE("write_epw then parse_epw is the identity on the extracted fields") {
  // Hourly year from the synthesizer, every fourth tick.
  const auto quarter = synthesize_climate(preset(Climate::mixed_humid), 3);
  WeatherSeries hourly;
  for (std::size_t i = 0; i < quarter.size(); i += 4) hourly.ticks.push_back(quarter[i]);
  REQUIRE(hourly.size() == 8760);

  const auto back = parse_epw(write_epw(hourly));
  REQUIRE(back.size() == 8760);
  for (std::size_t i = 0; i < back.size(); ++i) {
    REQUIRE(back[i] == hourly[i]);
  }
}

TEST_CASE("resample interpolates linearly between hourly ticks") {
  WeatherSeries hourly;
  hourly.ticks.push_back({{2021, 1, 1, 0, 0}, 10.0, 40.0, 2.0, 350.0, 0.0, 0.0});
  hourly.ticks.push_back({{2021, 1, 1, 1, 0}, 14.0, 60.0, 6.0, 10.0, 100.0, 400.0});
  const auto q = resample(hourly, 4);
  REQUIRE(q.size() == 8);
  CHECK(q.step_seconds == 900);
  CHECK(q[1].timestamp == Timestamp{2021, 1, 1, 0, 15});
  CHECK(q[1].drybulb_temp == doctest::Approx(11.0).epsilon(1e-12));
  CHECK(q[2].relative_humidity == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(q[3].direct_solar == doctest::Approx(300.0).epsilon(1e-12));
  CHECK(q[2].wind_direction == doctest::Approx(0.0).epsilon(1e-12));  // 350 -> 10 across north
  // the last hour wraps towards the first tick
  CHECK(q[6].drybulb_temp == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("synthesize_climate matches the annual statistics of each preset") {
  for (auto c : kAllClimates) {
    const auto p = preset(c);
    const auto s = synthesize_climate(p, 42);
    CAPTURE(p.name);
    REQUIRE(s.size() == 35040);
    CHECK(std::abs(s.mean_drybulb() - p.mean_annual_temp) <= 0.3);
    CHECK(std::abs(s.mean_humidity() - p.mean_annual_rh) <= 2.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& t = s[i];
      REQUIRE(t.relative_humidity >= 0.0);
      REQUIRE(t.relative_humidity <= 100.0);
      REQUIRE(t.direct_solar >= 0.0);
      REQUIRE(t.diffuse_solar >= 0.0);
      REQUIRE(t.wind_speed >= 0.0);
      REQUIRE(t.wind_direction >= 0.0);
      REQUIRE(t.wind_direction < 360.0);
      if (i > 0) REQUIRE(t.timestamp.to_sys() - s[i - 1].timestamp.to_sys() == std::chrono::seconds(900));
      if (t.timestamp.hour < 4) REQUIRE(t.direct_solar == 0.0);
    }
  }
  CHECK(preset(Climate::hot_dry).mean_annual_temp == 21.7);
  CHECK(preset(Climate::hot_dry).mean_annual_rh == 34.9);
  CHECK(preset(Climate::mixed_humid).mean_annual_temp == 12.6);
  CHECK(preset(Climate::mixed_humid).mean_annual_rh == 68.5);
  CHECK(preset(Climate::cool_marine).mean_annual_temp == 9.3);
  CHECK(preset(Climate::cool_marine).mean_annual_rh == 81.1);
}

TEST_CASE("synthesize_climate with zero amplitudes and noise is constant") {
  ClimateProfile flat{"flat", 17.5, 50.0, 0.0, 0.0, 0.0};
  const auto s = synthesize_climate(flat, 1);
  for (const auto& t : s.ticks) REQUIRE(t.drybulb_temp == 17.5);
}

TEST_CASE("synthesize_climate is seeded") {
  const auto a = synthesize_climate(preset(Climate::cool_marine), 5);
  const auto b = synthesize_climate(preset(Climate::cool_marine), 5);
  const auto c = synthesize_climate(preset(Climate::cool_marine), 6);
  CHECK(a.ticks == b.ticks);
  CHECK(a.ticks != c.ticks);
}

TEST_CASE("ou_perturb with sigma 0 and mu 0 is the identity") {
  const auto s = synthesize_climate(preset(Climate::hot_dry), 1);
  CHECK(ou_perturb(s, {0.0, 0.0, 0.001}, 9).ticks == s.ticks);
}

TEST_CASE("ou_perturb adds the seeded path to drybulb only") {
  const auto s = synthesize_climate(preset(Climate::hot_dry), 1);
  const OuParams p{1.0, 0.0, 0.001};
  const auto a = ou_perturb(s, p, 11);
  const auto b = ou_perturb(s, p, 11);
  CHECK(a.ticks == b.ticks);
  const auto x = ou_path(s.size(), p, 11);
  CHECK(x[0] == 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    REQUIRE(a[i].drybulb_temp == s[i].drybulb_temp + x[i]);
    REQUIRE(a[i].relative_humidity == s[i].relative_humidity);
    REQUIRE(a[i].direct_solar == s[i].direct_solar);
  }
}

TEST_CASE("ou_path innovations are standard normal under the stated recurrence") {
  const OuParams p{0.8, 0.3, 0.02};
  const std::size_t n = 200'000;
  const auto x = ou_path(n, p, 4);
  std::vector<double> eps(n - 1);
  for (std::size_t t = 0; t + 1 < n; ++t)
    eps[t] = (x[t + 1] - (1.0 - p.tau) * x[t] - p.tau * p.mu) / (p.sigma * std::sqrt(p.tau));
  double mean = 0.0;
  for (double e : eps) mean += e;
  mean /= static_cast<double>(eps.size());
  CHECK(std::abs(mean) < 0.01);  // 4.5 standard errors
  CHECK(std::abs(sample_variance(eps) - 1.0) < 0.015);
}

TEST_CASE("ou_path autocorrelation decays geometrically with ratio 1 - tau") {
  const OuParams p{1.0, 0.0, 0.05};
  const std::size_t n = 1'000'000;
  const auto x = ou_path(n, p, 42);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  auto autocov = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) s += (x[t] - mean) * (x[t + k] - mean);
    return s / static_cast<double>(n - k);
  };
  const double c0 = autocov(0);
  CHECK(c0 == doctest::Approx(1.0 / (2.0 - p.tau)).epsilon(0.05));
  for (std::size_t k : {1, 5, 10, 20}) {
    CAPTURE(k);
    CHECK(std::abs(autocov(k) / c0 - std::pow(1.0 - p.tau, static_cast<double>(k))) < 0.02);
  }
}

TEST_CASE("OU parameter validation") {
  CHECK_THROWS_AS(OuParams({-1.0, 0.0, 0.1}).validate(), ConfigError);
  CHECK_THROWS_AS(OuParams({1.0, 0.0, 0.0}).validate(), ConfigError);
  CHECK_THROWS_AS(OuParams({1.0, 0.0, 1.5}).validate(), ConfigError);
  CHECK_NOTHROW(OuParams({1.0, 0.0, 1.0}).validate());
}

TEST_CASE("weather CSV round-trip") {
  const auto s = synthesize_climate(preset(Climate::mixed_humid), 2);
  WeatherSeries day;
  day.step_seconds = s.step_seconds;
  day.ticks.assign(s.ticks.begin(), s.ticks.begin() + 96);
  const auto back = from_csv(to_csv(day));
  CHECK(back.ticks == day.ticks);
}

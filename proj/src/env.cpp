#include "thermoarena/env.hpp"

#include <algorithm>
#include <cmath>

#include "thermoarena/errors.hpp"

namespace thermoarena::env {

using building::Preset;

SetpointPair clamp_setpoints(SetpointPair raw) {
  using L = SetpointLimits;
  SetpointPair sp{std::clamp(raw.heating, L::heating_min, L::heating_max),
                  std::clamp(raw.cooling, L::cooling_min, L::cooling_max)};
  if (sp.heating >= sp.cooling) sp.heating = sp.cooling - L::ordering_margin;
  return sp;
}

Action clamp_action(const Action& raw) {
  Action out(raw.size());
  std::transform(raw.begin(), raw.end(), out.begin(), clamp_setpoints);
  return out;
}

Action action_from_unit(const Eigen::Ref<const Eigen::VectorXd>& unit) {
  using L = SetpointLimits;
  if (unit.size() % 2 != 0) throw ShapeMismatch("action vector must hold (heating, cooling) pairs");
  auto affine = [](double u, double lo, double hi) { return lo + 0.5 * (std::clamp(u, -1.0, 1.0) + 1.0) * (hi - lo); };
  Action a(unit.size() / 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i].heating = affine(unit(2 * i), L::heating_min, L::heating_max);
    a[i].cooling = affine(unit(2 * i + 1), L::cooling_min, L::cooling_max);
  }
  return a;
}

Eigen::VectorXd unit_from_action(const Action& action) {
  using L = SetpointLimits;
  Eigen::VectorXd u(2 * action.size());
  for (std::size_t i = 0; i < action.size(); ++i) {
    u(2 * i) = 2.0 * (action[i].heating - L::heating_min) / (L::heating_max - L::heating_min) - 1.0;
    u(2 * i + 1) = 2.0 * (action[i].cooling - L::cooling_min) / (L::cooling_max - L::cooling_min) - 1.0;
  }
  return u;
}

ComfortRange comfort_range_for(const Timestamp& date, Preset building) {
  if (building == Preset::two_zone_datacenter) return {18.0, 27.0};
  const bool summer = date.month >= 6 && date.month <= 9;
  return summer ? ComfortRange{23.0, 26.0} : ComfortRange{20.0, 23.5};
}

double comfort_deviation(std::span<const double> zone_temps, ComfortRange range) {
  double dev = 0.0;
  for (double t : zone_temps) dev += std::max(0.0, t - range.high) + std::max(0.0, range.low - t);
  return dev;
}

void RewardConfig::validate() const {
  if (!(omega >= 0.0 && omega <= 1.0)) throw ConfigError("reward.omega", "must lie in [0, 1]");
  if (!(lambda_p > 0.0)) throw ConfigError("reward.lambda_p", "must be > 0");
  if (!(lambda_t > 0.0)) throw ConfigError("reward.lambda_t", "must be > 0");
}

double compute_reward(double power, std::span<const double> zone_temps, ComfortRange range, const RewardConfig& cfg,
                      StepInfo* info) {
  const double deviation = comfort_deviation(zone_temps, range);
  const double power_term = (1.0 - cfg.omega) * cfg.lambda_p * power;
  const double comfort_term = cfg.omega * cfg.lambda_t * deviation;
  if (info) {
    info->electric_power = power;
    info->comfort_violation = deviation;
    info->power_term = power_term;
    info->comfort_term = comfort_term;
    info->range = range;
  }
  return -power_term - comfort_term;
}

MinMaxNormalizer::MinMaxNormalizer(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw ShapeMismatch("normalizer bounds differ in length");
}

Observation MinMaxNormalizer::normalize(const Eigen::Ref<const Eigen::VectorXd>& raw) {
  if (raw.size() != lower_.size()) throw ShapeMismatch("observation length does not match normalizer");
  lower_ = lower_.cwiseMin(raw);
  upper_ = upper_.cwiseMax(raw);
  return apply(raw);
}

Observation MinMaxNormalizer::apply(const Eigen::Ref<const Eigen::VectorXd>& raw) const {
  if (raw.size() != lower_.size()) throw ShapeMismatch("observation length does not match normalizer");
  Observation out(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const double span = upper_(i) - lower_(i);
    out(i) = span > 0.0 ? std::clamp((raw(i) - lower_(i)) / span, 0.0, 1.0) : 0.5;
  }
  return out;
}

namespace {

struct Slot {
  std::string name;
  double lo;
  double hi;
};

constexpr double kZoneTempLo = 0.0;
constexpr double kZoneTempHi = 40.0;

/// Per controlled group block, Table 1/2 order.
std::vector<Slot> zone_block(const std::string& prefix, double occupants) {
  using L = SetpointLimits;
  return {{prefix + "zone_heating_setpoint", L::heating_min, L::heating_max},
          {prefix + "zone_cooling_setpoint", L::cooling_min, L::cooling_max},
          {prefix + "zone_air_temperature", kZoneTempLo, kZoneTempHi},
          {prefix + "zone_mean_radiant_temperature", kZoneTempLo, kZoneTempHi},
          {prefix + "zone_air_relative_humidity", 0.0, 100.0},
          {prefix + "zone_clothing_value", 0.5, 1.0},
          {prefix + "zone_ppd", 5.0, 100.0},
          {prefix + "zone_occupant_count", 0.0, std::max(1.0, occupants)},
          {prefix + "people_air_temperature", kZoneTempLo, kZoneTempHi}};
}

/// Zones whose block appears in the observation, in observation order.
std::vector<std::vector<int>> observation_groups(const building::BuildingModel& m) {
  if (m.preset_id == Preset::five_zone) {
    std::vector<int> all(m.num_zones());
    for (int i = 0; i < m.num_zones(); ++i) all[i] = i;
    return {all};
  }
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < m.num_zones(); ++i) groups.push_back({i});  // file order: west, east
  return groups;
}

std::vector<Slot> layout(const building::BuildingModel& m) {
  std::vector<Slot> s = {{"outdoor_drybulb", -20.0, 45.0},     {"outdoor_relative_humidity", 0.0, 100.0},
                         {"wind_speed", 0.0, 30.0},            {"wind_direction", 0.0, 360.0},
                         {"diffuse_solar", 0.0, 500.0},        {"direct_solar", 0.0, 1000.0}};
  for (const auto& group : observation_groups(m)) {
    double occupants = 0.0;
    for (int z : group) occupants += m.zones[z].occupants;
    const std::string prefix = m.preset_id == Preset::five_zone ? "" : m.zones[group.front()].name + "_";
    auto block = zone_block(prefix, occupants);
    s.insert(s.end(), block.begin(), block.end());
  }
  s.push_back({"facility_hvac_power", 0.0, m.max_electric_power()});
  s.push_back({"year", 2000.0, 2050.0});
  s.push_back({"month", 1.0, 12.0});
  s.push_back({"day", 1.0, 31.0});
  s.push_back({"hour", 0.0, 23.0});
  return s;
}

double saturation_pressure(double temp_c) { return 6.112 * std::exp(17.62 * temp_c / (243.12 + temp_c)); }

}  // namespace

std::vector<std::string> observation_names(const building::BuildingModel& model) {
  std::vector<std::string> names;
  for (auto& s : layout(model)) names.push_back(s.name);
  return names;
}

MinMaxNormalizer default_normalizer(const building::BuildingModel& model) {
  const auto slots = layout(model);
  Eigen::VectorXd lo(slots.size()), hi(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    lo(i) = slots[i].lo;
    hi(i) = slots[i].hi;
  }
  return {lo, hi};
}

void EnvConfig::validate() const {
  building::parse_preset(building);
  if (episode_length_steps <= 0) throw ConfigError("episode_length_steps", "must be positive");
  if (!(timestep_s > 0.0)) throw ConfigError("timestep_s", "must be positive");
  if (!std::isfinite(initial_zone_temp)) throw ConfigError("initial_zone_temp_c", "must be finite");
  ou.validate();
  reward.validate();
}

EnvConfig EnvConfig::from_tree(const config::Tree& t) {
  EnvConfig c;
  c.building = config::get_or<std::string>(t, "building", c.building);
  c.climate = weather::parse_climate(config::get_or<std::string>(t, "climate", "hot_dry"));
  c.weather_file = config::get_or<std::string>(t, "weather_file", "");
  c.episode_length_steps = config::get_or<int>(t, "episode_length_steps", c.episode_length_steps);
  c.timestep_s = config::get_or<double>(t, "timestep_s", c.timestep_s);
  c.seed = config::get_or<std::uint64_t>(t, "seed", c.seed);
  c.weather_seed = config::get_or<std::uint64_t>(t, "weather_seed", c.weather_seed);
  c.initial_zone_temp = config::get_or<double>(t, "initial_zone_temp_c", c.initial_zone_temp);
  c.data_dir = config::get_or<std::string>(t, "data_dir", "");

  config::reject_unknown(t, "stochastic_weather", {"enabled", "sigma", "mu", "tau", "apply_in_eval"});
  c.stochastic_weather = config::get_or<bool>(t, "stochastic_weather.enabled", c.stochastic_weather);
  c.ou.sigma = config::get_or<double>(t, "stochastic_weather.sigma", c.ou.sigma);
  c.ou.mu = config::get_or<double>(t, "stochastic_weather.mu", c.ou.mu);
  c.ou.tau = config::get_or<double>(t, "stochastic_weather.tau", c.ou.tau);
  c.ou_in_eval = config::get_or<bool>(t, "stochastic_weather.apply_in_eval", c.ou_in_eval);

  config::reject_unknown(t, "reward", {"omega", "lambda_p", "lambda_t"});
  c.reward.omega = config::get_or<double>(t, "reward.omega", c.reward.omega);
  c.reward.lambda_p = config::get_or<double>(t, "reward.lambda_p", c.reward.lambda_p);
  c.reward.lambda_t = config::get_or<double>(t, "reward.lambda_t", c.reward.lambda_t);
  c.validate();
  return c;
}

void EnvConfig::to_tree(config::Tree& t) const {
  t.put("building", building);
  t.put("climate", std::string(weather::to_string(climate)));
  if (!weather_file.empty()) t.put("weather_file", weather_file);
  t.put("episode_length_steps", episode_length_steps);
  config::put_number(t, "timestep_s", timestep_s);
  t.put("seed", seed);
  t.put("weather_seed", weather_seed);
  config::put_number(t, "initial_zone_temp_c", initial_zone_temp);
  if (!data_dir.empty()) t.put("data_dir", data_dir);
  t.put("stochastic_weather.enabled", stochastic_weather ? "true" : "false");
  config::put_number(t, "stochastic_weather.sigma", ou.sigma);
  config::put_number(t, "stochastic_weather.mu", ou.mu);
  config::put_number(t, "stochastic_weather.tau", ou.tau);
  t.put("stochastic_weather.apply_in_eval", ou_in_eval ? "true" : "false");
  config::put_number(t, "reward.omega", reward.omega);
  config::put_number(t, "reward.lambda_p", reward.lambda_p);
  config::put_number(t, "reward.lambda_t", reward.lambda_t);
}

Action default_setpoints(Preset building) {
  if (building == Preset::five_zone) return {{20.0, 23.5}};
  return {{18.0, 27.0}, {18.0, 27.0}};
}

HvacEnv::HvacEnv(EnvConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  model_ = building::load_building(cfg_.building, cfg_.data_dir.empty() ? building::default_data_dir() : cfg_.data_dir);
  if (cfg_.weather_file.empty()) {
    base_weather_ = weather::synthesize_climate(weather::preset(cfg_.climate), cfg_.weather_seed);
  } else {
    const auto hourly = weather::read_epw_file(cfg_.weather_file);
    base_weather_ = weather::resample(hourly, 3600 / weather::kStepSeconds);
  }
  normalizer_ = default_normalizer(model_);
  rng_.seed(cfg_.seed);
}

void HvacEnv::set_normalizer(MinMaxNormalizer n) {
  if (n.size() != normalizer_.size()) throw ShapeMismatch("normalizer does not match this building's observation");
  normalizer_ = std::move(n);
}

Timestamp HvacEnv::now() const {
  const auto& start = base_weather_[0].timestamp;
  return Timestamp{start.year, 1, 1, 0, 0}.plus_seconds(
      static_cast<std::int64_t>(std::llround(step_ * cfg_.timestep_s)));
}

const weather::WeatherTick& HvacEnv::tick_at(int step) const {
  const auto& w = episode_weather_.empty() ? base_weather_ : episode_weather_;
  const auto idx = static_cast<std::size_t>(std::floor(step * cfg_.timestep_s / w.step_seconds));
  return w[idx % w.size()];
}

Observation HvacEnv::reset(std::optional<std::uint64_t> seed) {
  if (seed) rng_.seed(*seed);
  const std::uint64_t episode_seed = rng_();
  if (cfg_.stochastic_weather)
    episode_weather_ = weather::ou_perturb(base_weather_, cfg_.ou, episode_seed);
  else
    episode_weather_ = base_weather_;
  state_ = building::ZoneState::uniform(model_.num_zones(), cfg_.initial_zone_temp);
  setpoints_ = default_setpoints(model_.preset_id);
  last_power_ = 0.0;
  step_ = 0;
  done_ = false;
  return observe();
}

StepOutput HvacEnv::step(const Action& action) {
  if (done_) throw SteppedAfterDone();
  if (static_cast<int>(action.size()) != action_pairs())
    throw ShapeMismatch("expected " + std::to_string(action_pairs()) + " setpoint pairs");
  setpoints_ = clamp_action(action);
  const auto& tick = tick_at(step_);
  auto next = building::step_building(state_, model_, setpoints_, tick, cfg_.timestep_s);
  state_ = std::move(next.state);
  last_power_ = next.electric_power;
  ++step_;
  done_ = step_ >= cfg_.episode_length_steps;

  StepOutput out;
  out.info.timestamp = now();
  const auto range = comfort_range_for(out.info.timestamp, model_.preset_id);
  out.reward = compute_reward(last_power_, state_.temperatures, range, cfg_.reward, &out.info);
  out.info.outdoor_temp = tick_at(step_).drybulb_temp;
  out.info.zone_temps = state_.temperatures;
  out.info.setpoints = setpoints_;
  out.done = done_;
  out.observation = observe();
  return out;
}

Observation HvacEnv::observe() {
  return normalizer_frozen_ ? normalizer_.apply(raw_observation()) : normalizer_.normalize(raw_observation());
}

ControllerView HvacEnv::view() const {
  ControllerView v;
  v.now = now();
  v.setpoints = setpoints_;
  v.group_temps.assign(action_pairs(), 0.0);
  std::vector<int> count(action_pairs(), 0);
  for (int z = 0; z < model_.num_zones(); ++z) {
    v.group_temps[model_.zones[z].action_index] += state_.temperatures[z];
    ++count[model_.zones[z].action_index];
  }
  for (int g = 0; g < action_pairs(); ++g) v.group_temps[g] /= std::max(1, count[g]);
  return v;
}

Eigen::VectorXd HvacEnv::raw_observation() const {
  const auto& tick = tick_at(step_);
  const Timestamp ts = now();
  const auto range = comfort_range_for(ts, model_.preset_id);
  const bool summer = ts.month >= 6 && ts.month <= 9;

  std::vector<double> v = {tick.drybulb_temp, tick.relative_humidity, tick.wind_speed,
                           tick.wind_direction, tick.diffuse_solar,     tick.direct_solar};
  for (const auto& group : observation_groups(model_)) {
    double temp = 0.0, occupants = 0.0, deviation = 0.0;
    for (int z : group) {
      temp += state_.temperatures[z];
      occupants += model_.zones[z].occupants * building::occupancy_fraction(model_.zones[z].occupancy, ts);
      const double t = state_.temperatures[z];
      deviation += std::max(0.0, t - range.high) + std::max(0.0, range.low - t);
    }
    temp /= static_cast<double>(group.size());
    deviation /= static_cast<double>(group.size());
    const auto& sp = setpoints_[model_.zones[group.front()].action_index];
    // No moisture model: hold outdoor absolute humidity at zone temperature.
    const double zone_rh = std::clamp(
        tick.relative_humidity * saturation_pressure(tick.drybulb_temp) / saturation_pressure(temp), 0.0, 100.0);
    const double ppd = std::clamp(5.0 + 30.0 * deviation, 5.0, 100.0);
    const double clothing = summer ? 0.5 : 1.0;
    const double block[] = {sp.heating, sp.cooling, temp, temp, zone_rh, clothing, ppd, occupants, temp};
    v.insert(v.end(), std::begin(block), std::end(block));
  }
  v.push_back(last_power_);
  v.push_back(ts.year);
  v.push_back(ts.month);
  v.push_back(ts.day);
  v.push_back(ts.hour);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace thermoarena::env

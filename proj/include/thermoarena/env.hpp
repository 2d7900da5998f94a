#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "thermoarena/building.hpp"
#include "thermoarena/config.hpp"
#include "thermoarena/weather.hpp"

namespace thermoarena::env {

using Observation = Eigen::VectorXd;
using building::SetpointPair;
/// One setpoint pair per controlled group: five_zone has 1, the datacenter 2 (east, west).
using Action = std::vector<SetpointPair>;

struct SetpointLimits {
  static constexpr double heating_min = 15.0;
  static constexpr double heating_max = 22.5;
  static constexpr double cooling_min = 22.5;
  static constexpr double cooling_max = 30.0;
  /// Gap enforced when a clamped heating setpoint reaches the cooling setpoint.
  static constexpr double ordering_margin = 0.1;
};

SetpointPair clamp_setpoints(SetpointPair raw);
Action clamp_action(const Action& raw);

/// Maps a squashed vector in [-1, 1]^(2k) (heating, cooling per pair) onto setpoint ranges.
Action action_from_unit(const Eigen::Ref<const Eigen::VectorXd>& unit);
/// Inverse of action_from_unit for in-range actions.
Eigen::VectorXd unit_from_action(const Action& action);

struct ComfortRange {
  double low = 20.0;
  double high = 23.5;
  bool operator==(const ComfortRange&) const = default;
};

ComfortRange comfort_range_for(const Timestamp& date, building::Preset building);

/// Sum over zones of the distance outside [low, high].
double comfort_deviation(std::span<const double> zone_temps, ComfortRange range);

struct RewardConfig {
  double omega = 0.5;      // comfort weight
  double lambda_p = 1e-4;  // 1/W
  double lambda_t = 1.0;   // 1/degC

  void validate() const;
};

struct StepInfo {
  double electric_power = 0.0;     // W
  double comfort_violation = 0.0;  // degC, summed over zones
  double power_term = 0.0;         // (1 - omega) * lambda_p * P
  double comfort_term = 0.0;       // omega * lambda_t * deviation
  Timestamp timestamp;             // time at the end of the step
  double outdoor_temp = 0.0;
  std::vector<double> zone_temps;
  Action setpoints;
  ComfortRange range;
};

/// reward = -(1 - omega) * lambda_p * power - omega * lambda_t * deviation.
double compute_reward(double power, std::span<const double> zone_temps, ComfortRange range, const RewardConfig& cfg,
                      StepInfo* info = nullptr);

/// Running min-max normalization. Bounds start at physical limits and widen
/// whenever a value falls outside them.
class MinMaxNormalizer {
 public:
  MinMaxNormalizer() = default;
  MinMaxNormalizer(Eigen::VectorXd lower, Eigen::VectorXd upper);

  Observation normalize(const Eigen::Ref<const Eigen::VectorXd>& raw);
  /// Same mapping without updating the tracker.
  Observation apply(const Eigen::Ref<const Eigen::VectorXd>& raw) const;

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  Eigen::Index size() const { return lower_.size(); }

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// Slot names in observation order.
std::vector<std::string> observation_names(const building::BuildingModel& model);
MinMaxNormalizer default_normalizer(const building::BuildingModel& model);

struct EnvConfig {
  std::string building = "five_zone";
  weather::Climate climate = weather::Climate::hot_dry;
  std::string weather_file;  // optional EPW, overrides the climate synthesizer
  bool stochastic_weather = true;
  weather::OuParams ou;
  bool ou_in_eval = true;
  int episode_length_steps = 35040;
  double timestep_s = 900.0;
  RewardConfig reward;
  std::uint64_t seed = 42;          // episode weather perturbations
  std::uint64_t weather_seed = 2021;  // synthetic base year, shared by every run on a climate
  double initial_zone_temp = 21.0;
  std::string data_dir;  // empty: building::default_data_dir()

  void validate() const;
  static EnvConfig from_tree(const config::Tree& tree);
  void to_tree(config::Tree& tree) const;
};

/// What a rule-based controller may look at.
struct ControllerView {
  Timestamp now;
  std::vector<double> group_temps;  // mean zone temperature per action pair
  Action setpoints;
};

struct StepOutput {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

/// Gym-style episode loop over the RC building surrogate.
class HvacEnv {
 public:
  explicit HvacEnv(EnvConfig cfg);

  /// Starts an episode at Jan 1 00:00. A seed reseeds the episode generator.
  Observation reset(std::optional<std::uint64_t> seed = std::nullopt);
  StepOutput step(const Action& action);

  int observation_size() const { return static_cast<int>(normalizer_.size()); }
  int action_pairs() const { return model_.num_action_pairs(); }
  int action_dim() const { return 2 * action_pairs(); }
  bool done() const { return done_; }
  int steps_taken() const { return step_; }

  const EnvConfig& config() const { return cfg_; }
  const building::BuildingModel& model() const { return model_; }
  const building::ZoneState& state() const { return state_; }
  ControllerView view() const;

  MinMaxNormalizer& normalizer() { return normalizer_; }
  const MinMaxNormalizer& normalizer() const { return normalizer_; }
  void set_normalizer(MinMaxNormalizer n);
  /// A frozen normalizer maps observations without widening its bounds.
  void freeze_normalizer(bool frozen) { normalizer_frozen_ = frozen; }

  /// Raw (unnormalized) observation of the current state.
  Eigen::VectorXd raw_observation() const;
  Timestamp now() const;

 private:
  const weather::WeatherTick& tick_at(int step) const;
  Observation observe();

  EnvConfig cfg_;
  building::BuildingModel model_;
  weather::WeatherSeries base_weather_;
  weather::WeatherSeries episode_weather_;
  MinMaxNormalizer normalizer_;
  bool normalizer_frozen_ = false;
  std::mt19937_64 rng_;
  building::ZoneState state_;
  Action setpoints_;
  double last_power_ = 0.0;
  int step_ = 0;
  bool done_ = true;
};

Action default_setpoints(building::Preset building);

}  // namespace thermoarena::env

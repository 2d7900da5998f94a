#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>

#include "thermoarena/env.hpp"

namespace thermoarena::controllers {

/// Seasonal static setpoints for the office: (26, 29) June-September, else (20, 23.5).
env::Action rbc_5zone(const Timestamp& date);

struct RbcState {
  env::Action current_setpoints;
  double step_size = 1.0;  // degC per correction

  static RbcState initial(int pairs);
};

/// Degree-by-degree integral correction, independently per zone: above 27 both
/// setpoints drop by step_size, below 18 both rise, otherwise unchanged.
std::pair<env::Action, RbcState> rbc_datacenter(std::span<const double> zone_temps, RbcState state);

/// Uniform setpoints over the action ranges, ordering-repaired.
class RandomAgent {
 public:
  RandomAgent(std::uint64_t seed, int pairs);
  env::Action next();

 private:
  std::mt19937_64 rng_;
  int pairs_;
};

/// Anything that can drive an environment episode.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual void reset() {}
  virtual env::Action act(const env::Observation& obs, const env::ControllerView& view) = 0;
  virtual std::string name() const = 0;
};

/// `rbc` (building-appropriate rule-based controller) or `random`.
std::unique_ptr<Controller> make_controller(const std::string& name, building::Preset building, std::uint64_t seed);

}  // namespace thermoarena::controllers

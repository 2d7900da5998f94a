#include "thermoarena/controllers.hpp"

#include "thermoarena/errors.hpp"

namespace thermoarena::controllers {

using env::Action;
using env::SetpointLimits;

Action rbc_5zone(const Timestamp& date) {
  const bool summer = date.month >= 6 && date.month <= 9;
  return summer ? Action{{26.0, 29.0}} : Action{{20.0, 23.5}};
}

RbcState RbcState::initial(int pairs) {
  RbcState s;
  s.current_setpoints.assign(pairs, {18.0, 27.0});
  return s;
}

std::pair<Action, RbcState> rbc_datacenter(std::span<const double> zone_temps, RbcState state) {
  constexpr double low = 18.0;
  constexpr double high = 27.0;
  if (zone_temps.size() != state.current_setpoints.size())
    throw ShapeMismatch("rbc_datacenter: one temperature per setpoint pair required");
  for (std::size_t z = 0; z < zone_temps.size(); ++z) {
    auto& sp = state.current_setpoints[z];
    double delta = 0.0;
    if (zone_temps[z] > high) delta = -state.step_size;
    if (zone_temps[z] < low) delta = state.step_size;
    // Each setpoint saturates at its own range limit.
    sp.heating = std::clamp(sp.heating + delta, SetpointLimits::heating_min, SetpointLimits::heating_max);
    sp.cooling = std::clamp(sp.cooling + delta, SetpointLimits::cooling_min, SetpointLimits::cooling_max);
    sp = env::clamp_setpoints(sp);
  }
  return {state.current_setpoints, state};
}

RandomAgent::RandomAgent(std::uint64_t seed, int pairs) : rng_(seed), pairs_(pairs) {}

Action RandomAgent::next() {
  std::uniform_real_distribution<double> heat(SetpointLimits::heating_min, SetpointLimits::heating_max);
  std::uniform_real_distribution<double> cool(SetpointLimits::cooling_min, SetpointLimits::cooling_max);
  Action a(pairs_);
  for (auto& sp : a) {
    sp.heating = heat(rng_);
    sp.cooling = cool(rng_);
  }
  return env::clamp_action(a);
}

namespace {

class SeasonalRbc final : public Controller {
 public:
  Action act(const env::Observation&, const env::ControllerView& view) override { return rbc_5zone(view.now); }
  std::string name() const override { return "rbc"; }
};

class IntegralRbc final : public Controller {
 public:
  explicit IntegralRbc(int pairs) : pairs_(pairs), state_(RbcState::initial(pairs)) {}
  void reset() override { state_ = RbcState::initial(pairs_); }
  Action act(const env::Observation&, const env::ControllerView& view) override {
    auto [action, next] = rbc_datacenter(view.group_temps, state_);
    state_ = std::move(next);
    return action;
  }
  std::string name() const override { return "rbc"; }

 private:
  int pairs_;
  RbcState state_;
};

class RandomController final : public Controller {
 public:
  RandomController(std::uint64_t seed, int pairs) : agent_(seed, pairs) {}
  Action act(const env::Observation&, const env::ControllerView&) override { return agent_.next(); }
  std::string name() const override { return "random"; }

 private:
  RandomAgent agent_;
};

}  // namespace

std::unique_ptr<Controller> make_controller(const std::string& name, building::Preset building, std::uint64_t seed) {
  const int pairs = building == building::Preset::five_zone ? 1 : 2;
  if (name == "rbc") {
    if (building == building::Preset::five_zone) return std::make_unique<SeasonalRbc>();
    return std::make_unique<IntegralRbc>(pairs);
  }
  if (name == "random") return std::make_unique<RandomController>(seed, pairs);
  throw ConfigError("controller", "unknown controller '" + name + "' (expected rbc or random)");
}

}  // namespace thermoarena::controllers

// Prints the explicit-Euler stability margin of each preset and its response to
// constant outdoor temperatures, free-running and under the rule-based controller.
#include <cstdio>
#include <span>
#include <tuple>
#include <algorithm>

#include "thermoarena/building.hpp"
#include "thermoarena/controllers.hpp"
#include "thermoarena/env.hpp"

using namespace thermoarena;

namespace {

constexpr double kDt = 900.0;

void stability(const building::BuildingModel& model) {
  for (const auto& z : model.zones) {
    double coupling = 0.0;
    for (const auto& [ij, r] : model.coupling_resistances)
      if (model.zones[ij.first].name == z.name || model.zones[ij.second].name == z.name) coupling += 1.0 / r;
    const double k = std::max(z.heating_gain(), z.cooling_gain()) + 1.0 / z.envelope_resistance + coupling;
    std::printf("  %-12s k*dt/C = %.3f (must stay below 1)\n", z.name.c_str(), k * kDt / z.capacitance);
  }
}

void response(const building::BuildingModel& model, double outdoor, bool controlled) {
  auto state = building::ZoneState::uniform(model.num_zones(), 21.0);
  controllers::RbcState rbc = controllers::RbcState::initial(model.num_action_pairs());
  env::Action action = env::default_setpoints(model.preset_id);
  weather::WeatherTick tick;
  tick.timestamp = Timestamp::parse("2021-01-04T00:00");
  tick.drybulb_temp = outdoor;
  tick.relative_humidity = 50.0;
  double energy = 0.0;
  const int steps = 96 * 7;
  for (int s = 0; s < steps; ++s) {
    if (controlled) {
      if (model.preset_id == building::Preset::five_zone) {
        action = controllers::rbc_5zone(tick.timestamp);
      } else {
        std::vector<double> groups(model.num_action_pairs(), 0.0), counts(model.num_action_pairs(), 0.0);
        for (int z = 0; z < model.num_zones(); ++z) {
          groups[model.zones[z].action_index] += state.temperatures[z];
          counts[model.zones[z].action_index] += 1.0;
        }
        for (std::size_t g = 0; g < groups.size(); ++g) groups[g] /= counts[g];
        std::tie(action, rbc) = controllers::rbc_datacenter(groups, rbc);
      }
    }
    const auto out = building::step_building(state, model, action, tick, kDt, controlled);
    state = out.state;
    energy += out.electric_power;
    tick.timestamp = tick.timestamp.plus_seconds(static_cast<long>(kDt));
  }
  std::printf("  outdoor %5.1f  %-5s", outdoor, controlled ? "rbc" : "free");
  for (double t : state.temperatures) std::printf(" %6.2f", t);
  std::printf("  mean power %8.1f W\n", energy / steps);
}

}  // namespace

int main() {
  for (auto preset : {building::Preset::five_zone, building::Preset::two_zone_datacenter}) {
    const auto model = building::load_building(preset);
    std::printf("%s (max electric draw %.0f W)\n", building::to_string(preset).c_str(), model.max_electric_power());
    stability(model);
    for (double outdoor : {-5.0, 10.0, 25.0, 35.0}) {
      response(model, outdoor, false);
      response(model, outdoor, true);
    }
  }
}

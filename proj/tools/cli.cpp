#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "thermoarena/building.hpp"
#include "thermoarena/controllers.hpp"
#include "thermoarena/drl/checkpoint.hpp"
#include "thermoarena/env.hpp"
#include "thermoarena/experiments.hpp"
#include "thermoarena/plot.hpp"
#include "thermoarena/run.hpp"

namespace thermoarena::cli {

namespace ex = experiments;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  int episodes = 0;
  std::string building;
  std::string climate;
  std::string algo;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("--config", c.config, "INI config file or a manifest.json of an earlier run");
  if (config_required) opt->required();
  sub->add_option("--out", c.out, "Output root (default: $THERMOARENA_OUT, else ./runs)");
  sub->add_option("--seed", c.seed, "Seed for environment, agent and schedule");
  sub->add_flag("--quiet", c.quiet, "Suppress progress output");
}

void add_overrides(CLI::App* sub, Common& c, bool climate, bool episodes) {
  sub->add_option("--building", c.building, "Building preset (five_zone, two_zone_datacenter)");
  sub->add_option("--algo", c.algo, "Algorithm (sac, td3, ppo); resets the agent section to its defaults");
  if (climate) sub->add_option("--climate", c.climate, "Climate (hot_dry, mixed_humid, cool_marine)");
  if (episodes) sub->add_option("--episodes", c.episodes, "Training episodes (per phase where applicable)")->check(CLI::PositiveNumber);
}

run::RunConfig resolve(const Common& c) {
  run::RunConfig cfg = c.config.empty() ? run::RunConfig{} : run::load_config(c.config);
  if (!c.building.empty()) {
    building::parse_preset(c.building);
    cfg.env.building = c.building;
  }
  if (!c.climate.empty()) cfg.env.climate = weather::parse_climate(c.climate);
  if (!c.algo.empty()) {
    const auto algo = drl::parse_algorithm(c.algo);
    if (algo != cfg.agent.algorithm) {
      const auto seed = cfg.agent.seed;
      cfg.agent = drl::AgentConfig::defaults(algo);
      cfg.agent.seed = seed;
    }
  }
  if (c.seed) cfg.set_seed(*c.seed);
  if (c.episodes > 0) {
    cfg.schedule.n_train_episodes = c.episodes;
    cfg.schedule.eval_frequency = std::min(cfg.schedule.eval_frequency, c.episodes);
  }
  cfg.validate();
  return cfg;
}

/// One run directory: manifest, config snapshot and an append-only run.log.
class RunScope {
 public:
  RunScope(const std::string& command, const run::RunConfig& cfg, const Common& c, const std::string& extra = "")
      : id_(run::make_run_id(command, cfg, extra)),
        dir_(run::fresh_run_dir(run::output_root(c.out), id_)),
        manifest_(dir_, id_, command, cfg),
        log_(std::make_shared<std::ofstream>(dir_ / "run.log", std::ios::app | std::ios::binary)),
        quiet_(c.quiet) {}

  ~RunScope() {
    if (!done_) {
      try {
        manifest_.finish("failed");
      } catch (...) {
      }
    }
  }

  void begin() {
    manifest_.add_artifact("log", "run.log");
    manifest_.begin();
    progress()("run " + id_ + " in " + dir_.string());
  }

  ex::Progress progress() const {
    return [log = log_, quiet = quiet_](const std::string& line) {
      *log << line << '\n' << std::flush;
      if (!quiet) std::cerr << line << '\n';
    };
  }

  fs::path artifact(const std::string& name, const std::string& file) {
    manifest_.add_artifact(name, file);
    return dir_ / file;
  }

  void option(const std::string& key, const std::string& value) { manifest_.set_extra(key, value); }

  void finish() {
    manifest_.finish("completed");
    done_ = true;
    std::cout << dir_.string() << '\n';
  }

  const std::string& id() const { return id_; }

 private:
  std::string id_;
  fs::path dir_;
  run::Manifest manifest_;
  std::shared_ptr<std::ofstream> log_;
  bool quiet_;
  bool done_ = false;
};

std::vector<ex::LogRow> concat(std::vector<ex::LogRow> a, const std::vector<ex::LogRow>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string climate_name(weather::Climate c) { return std::string(weather::to_string(c)); }

// --- commands ------------------------------------------------------------------

int cmd_train(const Common& c) {
  const auto cfg = resolve(c);
  RunScope scope("train", cfg, c);
  scope.begin();
  auto result = ex::train(cfg.env, cfg.agent, cfg.schedule, {"train", scope.progress(), {}});
  drl::save_policy(result.best_policy, scope.artifact("checkpoint", "policy.json"));

  std::vector<ex::TraceRow> trace;
  const auto final = ex::evaluate(cfg.env, result.best_policy, cfg.schedule.final_eval_episodes, cfg.schedule.eval_seed, &trace);
  ex::write_metrics_csv(scope.artifact("metrics", "metrics.csv"), scope.id(), concat(result.log, ex::summary_rows("final", final)));
  ex::write_trace_csv(scope.artifact("trace", "trace.csv"), trace);
  scope.progress()("final evaluation over " + std::to_string(final.episodes.size()) + " episodes: mean reward " +
                   ex::format_number(final.mean_episode_reward) + ", violation " +
                   ex::format_number(final.comfort_violation_pct) + " %, power " +
                   ex::format_number(final.mean_power_demand) + " W");
  scope.finish();
  return kOk;
}

int cmd_eval(const Common& c, const std::string& checkpoint, const std::string& controller) {
  if (checkpoint.empty() && controller.empty())
    throw ConfigError("--checkpoint", "eval needs --checkpoint or --controller");
  auto cfg = resolve(c);
  std::optional<drl::TrainedPolicy> policy;
  std::string extra;
  if (!checkpoint.empty()) {
    policy = drl::load_policy(checkpoint);
    if (c.config.empty() && c.building.empty()) cfg.env.building = policy->building;
    if (policy->building != cfg.env.building)
      throw ShapeMismatch("checkpoint was trained on '" + policy->building + "', config builds '" + cfg.env.building + "'");
    extra = "checkpoint:" + drl::to_json(*policy);
  } else {
    extra = "controller:" + controller;
  }
  const int episodes = c.episodes > 0 ? c.episodes : cfg.schedule.final_eval_episodes;

  RunScope scope("eval", cfg, c, extra + "\nepisodes:" + std::to_string(episodes));
  if (!checkpoint.empty()) scope.option("checkpoint", fs::absolute(checkpoint).string());
  if (!controller.empty()) scope.option("controller", controller);
  scope.option("episodes", std::to_string(episodes));
  scope.begin();

  std::vector<ex::TraceRow> trace;
  ex::MetricsSummary summary;
  if (policy) {
    summary = ex::evaluate(cfg.env, *policy, episodes, cfg.schedule.eval_seed, &trace);
  } else {
    auto ctl = controllers::make_controller(controller, building::parse_preset(cfg.env.building), cfg.seed());
    summary = ex::evaluate(cfg.env, *ctl, episodes, cfg.schedule.eval_seed, &trace);
  }
  ex::write_metrics_csv(scope.artifact("metrics", "metrics.csv"), scope.id(), ex::summary_rows("eval", summary));
  ex::write_trace_csv(scope.artifact("trace", "trace.csv"), trace);
  scope.progress()("evaluation over " + std::to_string(episodes) + " episodes: mean reward " +
                   ex::format_number(summary.mean_episode_reward) + " (sd " +
                   ex::format_number(summary.sd_episode_reward) + "), violation " +
                   ex::format_number(summary.comfort_violation_pct) + " %, power " +
                   ex::format_number(summary.mean_power_demand) + " W");
  scope.finish();
  return kOk;
}

int cmd_crosseval(const Common& c) {
  const auto cfg = resolve(c);
  RunScope scope("crosseval", cfg, c);
  scope.begin();
  const auto result = ex::cross_evaluate(cfg.env, cfg.agent, cfg.schedule, scope.progress());

  std::vector<ex::LogRow> rows;
  for (auto t : weather::kAllClimates) {
    rows = concat(rows, result.training.at(t).log);
    drl::save_policy(result.training.at(t).best_policy,
                     scope.artifact("checkpoint_" + climate_name(t), "policy_" + climate_name(t) + ".json"));
  }
  for (auto t : weather::kAllClimates)
    for (auto e : weather::kAllClimates)
      rows = concat(rows, ex::summary_rows("cross/" + climate_name(t) + "/" + climate_name(e), result.cells.at({t, e})));
  for (auto e : weather::kAllClimates) rows = concat(rows, ex::summary_rows("rbc/" + climate_name(e), result.rbc.at(e)));

  ex::write_metrics_csv(scope.artifact("metrics", "metrics.csv"), scope.id(), rows);
  ex::write_crosseval_csv(scope.artifact("crosseval", "crosseval.csv"), result);
  ex::write_baseline_csv(scope.artifact("baseline", "baseline.csv"), result);
  scope.finish();
  return kOk;
}

int cmd_curriculum(const Common& c, const std::string& order, bool clear_buffer, int episodes_per_phase) {
  auto cfg = resolve(c);
  if (!order.empty()) cfg.curriculum_order = run::parse_climate_list(order, "--order");
  if (clear_buffer) cfg.curriculum.clear_buffer = true;
  if (episodes_per_phase > 0) cfg.curriculum.episodes_per_phase = episodes_per_phase;
  cfg.validate();

  RunScope scope("curriculum", cfg, c);
  scope.begin();
  const auto result =
      ex::curriculum_train(cfg.env, cfg.agent, cfg.curriculum_order, cfg.schedule, cfg.curriculum, scope.progress());
  drl::save_policy(result.policy, scope.artifact("checkpoint", "policy.json"));

  std::vector<ex::LogRow> rows;
  for (const auto& phase : result.phases) rows = concat(rows, phase.log);
  for (auto e : weather::kAllClimates) {
    auto env_cfg = cfg.env;
    env_cfg.climate = e;
    const auto summary = ex::evaluate(env_cfg, result.policy, cfg.schedule.final_eval_episodes, cfg.schedule.eval_seed);
    rows = concat(rows, ex::summary_rows("final/" + climate_name(e), summary));
    scope.progress()("curriculum policy in " + climate_name(e) + ": mean reward " +
                     ex::format_number(summary.mean_episode_reward));
  }
  ex::write_metrics_csv(scope.artifact("metrics", "metrics.csv"), scope.id(), rows);
  scope.finish();
  return kOk;
}

int cmd_tradeoff(const Common& c, const std::string& omegas) {
  auto cfg = resolve(c);
  if (!omegas.empty()) cfg.omegas = run::parse_number_list(omegas, "--omegas");
  cfg.validate();

  RunScope scope("tradeoff", cfg, c);
  scope.begin();
  const auto cells = ex::tradeoff_sweep(cfg.env, cfg.agent, cfg.omegas, cfg.schedule, scope.progress());

  std::vector<ex::LogRow> rows;
  std::ostringstream table;
  table << "omega,mean_reward,sd_reward,mean_power_w,comfort_violation_pct,mean_violation_degc\n";
  for (const auto& cell : cells) {
    const auto w = ex::format_number(cell.omega);
    rows = concat(rows, cell.training.log);
    rows = concat(rows, ex::summary_rows("final/omega=" + w, cell.evaluation));
    drl::save_policy(cell.training.best_policy, scope.artifact("checkpoint_omega_" + w, "policy_omega_" + w + ".json"));
    const auto& s = cell.evaluation;
    table << w << ',' << ex::format_number(s.mean_episode_reward) << ',' << ex::format_number(s.sd_episode_reward) << ','
          << ex::format_number(s.mean_power_demand) << ',' << ex::format_number(s.comfort_violation_pct) << ','
          << ex::format_number(s.mean_violation_degc) << '\n';
  }
  ex::write_metrics_csv(scope.artifact("metrics", "metrics.csv"), scope.id(), rows);
  std::ofstream(scope.artifact("tradeoff", "tradeoff.csv"), std::ios::binary) << table.str();
  scope.finish();
  return kOk;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& output, const std::string& out_dir) {
  if (!output.empty() && inputs.size() != 1) throw ConfigError("--output", "needs exactly one input CSV");
  for (const auto& in : inputs) {
    const fs::path input(in);
    const std::string svg = plot::render(input);
    fs::path target;
    if (!output.empty()) {
      target = output;
    } else {
      const fs::path dir = out_dir.empty() ? input.parent_path() : fs::path(out_dir);
      target = dir / input.filename().replace_extension(".svg");
    }
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    std::ofstream out(target, std::ios::binary);
    if (!out) throw Error("cannot write " + target.string());
    out << svg;
    std::cout << target.string() << '\n';
  }
  return kOk;
}

int cmd_presets() {
  std::cout << "buildings:\n";
  for (auto p : {building::Preset::five_zone, building::Preset::two_zone_datacenter}) {
    const auto model = building::load_building(p);
    std::cout << "  " << building::to_string(p) << ": " << model.num_zones() << " zones, "
              << model.num_action_pairs() * 2 << " actions, " << env::observation_names(model).size()
              << " observations\n";
  }
  std::cout << "climates:\n";
  for (auto c : weather::kAllClimates) {
    const auto profile = weather::preset(c);
    std::cout << "  " << weather::to_string(c) << ": mean " << profile.mean_annual_temp << " degC, seasonal swing +/-"
              << profile.seasonal_amplitude << " degC\n";
  }
  std::cout << "algorithms:\n  sac\n  td3\n  ppo\ncontrollers:\n  rbc\n  random\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Deep reinforcement learning for HVAC setpoint control on an RC building surrogate", "thermoarena"};
  app.set_version_flag("--version", THERMOARENA_VERSION);
  app.require_subcommand(1);

  Common common;
  auto* train = app.add_subcommand("train", "Train one agent, keep the best evaluated policy, evaluate it");
  add_common(train, common, true);
  add_overrides(train, common, true, true);

  std::string checkpoint, controller;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint or a baseline controller");
  add_common(eval, common, false);
  add_overrides(eval, common, true, false);
  eval->add_option("--episodes", common.episodes, "Evaluation episodes")->check(CLI::PositiveNumber);
  auto* ck = eval->add_option("--checkpoint", checkpoint, "Policy JSON written by train")->check(CLI::ExistingFile);
  auto* ctl = eval->add_option("--controller", controller, "Baseline controller (rbc, random)");
  ck->excludes(ctl);

  auto* cross = app.add_subcommand("crosseval", "Train per climate and evaluate every agent in every climate");
  add_common(cross, common, false);
  add_overrides(cross, common, false, true);

  std::string order;
  bool clear_buffer = false;
  int per_phase = 0;
  auto* curr = app.add_subcommand("curriculum", "Train one agent through climates in sequence");
  add_common(curr, common, false);
  add_overrides(curr, common, false, true);
  curr->add_option("--order", order, "Comma-separated climates, e.g. cool,mixed,hot");
  curr->add_flag("--clear-buffer", clear_buffer, "Empty the replay buffer between phases");
  curr->add_option("--episodes-per-phase", per_phase, "Training episodes per phase (default: the schedule's)")
      ->check(CLI::PositiveNumber);

  std::string omegas;
  auto* trade = app.add_subcommand("tradeoff", "Train and evaluate one agent per comfort weight");
  add_common(trade, common, false);
  add_overrides(trade, common, true, true);
  trade->add_option("--omegas", omegas, "Comma-separated comfort weights in [0, 1]");

  std::vector<std::string> inputs;
  std::string output, plot_out;
  auto* plot = app.add_subcommand("plot", "Render metrics.csv, crosseval.csv or trace.csv as SVG");
  plot->add_option("inputs", inputs, "CSV files")->required();
  plot->add_option("-o,--output", output, "SVG path (single input only)");
  plot->add_option("--out", plot_out, "Directory for the SVG files (default: next to each input)");
  plot->add_flag("--quiet", common.quiet, "Accepted for symmetry; plot prints only the written paths");

  auto* presets = app.add_subcommand("presets", "List buildings, climates, algorithms and controllers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (train->parsed()) return cmd_train(common);
    if (eval->parsed()) return cmd_eval(common, checkpoint, controller);
    if (cross->parsed()) return cmd_crosseval(common);
    if (curr->parsed()) return cmd_curriculum(common, order, clear_buffer, per_phase);
    if (trade->parsed()) return cmd_tradeoff(common, omegas);
    if (plot->parsed()) return cmd_plot(inputs, output, plot_out);
    if (presets->parsed()) return cmd_presets();
  } catch (const ConfigError& e) {
    std::cerr << "error: invalid configuration: " << e.what() << '\n';
    return kUsageError;
  } catch (const ShapeMismatch& e) {
    std::cerr << "error: checkpoint mismatch: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace thermoarena::cli

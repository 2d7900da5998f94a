#include "thermoarena/experiments.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace thermoarena::experiments {

void TrainSchedule::validate() const {
  if (n_train_episodes <= 0) throw ConfigError("schedule.n_train_episodes", "must be positive");
  if (eval_frequency <= 0) throw ConfigError("schedule.eval_frequency", "must be positive");
  if (eval_frequency > n_train_episodes) throw ConfigError("schedule.eval_frequency", "must not exceed n_train_episodes");
  if (eval_length <= 0) throw ConfigError("schedule.eval_length", "must be positive");
  if (final_eval_episodes <= 0) throw ConfigError("schedule.final_eval_episodes", "must be positive");
}

TrainSchedule TrainSchedule::from_tree(const config::Tree& t) {
  config::reject_unknown(t, "schedule",
                         {"n_train_episodes", "eval_frequency", "eval_length", "final_eval_episodes", "seed", "eval_seed"});
  TrainSchedule s;
  s.n_train_episodes = config::get_or(t, "schedule.n_train_episodes", s.n_train_episodes);
  s.eval_frequency = config::get_or(t, "schedule.eval_frequency", s.eval_frequency);
  s.eval_length = config::get_or(t, "schedule.eval_length", s.eval_length);
  s.final_eval_episodes = config::get_or(t, "schedule.final_eval_episodes", s.final_eval_episodes);
  s.seed = config::get_or<std::uint64_t>(t, "schedule.seed", s.seed);
  s.eval_seed = config::get_or<std::uint64_t>(t, "schedule.eval_seed", s.eval_seed);
  s.validate();
  return s;
}

void TrainSchedule::to_tree(config::Tree& t) const {
  t.put("schedule.n_train_episodes", n_train_episodes);
  t.put("schedule.eval_frequency", eval_frequency);
  t.put("schedule.eval_length", eval_length);
  t.put("schedule.final_eval_episodes", final_eval_episodes);
  t.put("schedule.seed", seed);
  t.put("schedule.eval_seed", eval_seed);
}

// --- metrics -----------------------------------------------------------------

void MetricsAccumulator::add(double reward, const env::StepInfo& info) {
  reward_ += reward;
  power_ += info.electric_power;
  deviation_ += info.comfort_violation;
  if (info.comfort_violation > 0.0) ++violations_;
  ++steps_;
}

EpisodeMetrics MetricsAccumulator::finish() const {
  if (steps_ == 0) return {};
  const double n = static_cast<double>(steps_);
  return {reward_ / n, power_ / n, 100.0 * static_cast<double>(violations_) / n, deviation_ / n, steps_};
}

MetricsSummary MetricsSummary::from_episodes(std::vector<EpisodeMetrics> episodes) {
  MetricsSummary s;
  s.episodes = std::move(episodes);
  if (s.episodes.empty()) return s;
  const double n = static_cast<double>(s.episodes.size());
  for (const auto& e : s.episodes) {
    s.mean_episode_reward += e.mean_reward / n;
    s.mean_power_demand += e.mean_power_w / n;
    s.comfort_violation_pct += e.comfort_violation_pct / n;
    s.mean_violation_degc += e.mean_violation_degc / n;
  }
  if (s.episodes.size() > 1) {
    double ss = 0.0;
    for (const auto& e : s.episodes) ss += (e.mean_reward - s.mean_episode_reward) * (e.mean_reward - s.mean_episode_reward);
    s.sd_episode_reward = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

EpisodeMetrics MetricsSummary::as_row() const {
  long steps = 0;
  for (const auto& e : episodes) steps += e.steps;
  return {mean_episode_reward, mean_power_demand, comfort_violation_pct, mean_violation_degc, steps};
}

// --- episode runner ----------------------------------------------------------

namespace {

using Decide = std::function<env::Action(const env::Observation&, const env::ControllerView&)>;

void record_trace(const env::HvacEnv& env, int step, const env::StepOutput& out, std::vector<TraceRow>& trace) {
  const auto& model = env.model();
  for (int z = 0; z < model.num_zones(); ++z) {
    const auto& sp = out.info.setpoints[model.zones[z].action_index];
    trace.push_back({step, out.info.timestamp, out.info.outdoor_temp, model.zones[z].name, out.info.zone_temps[z],
                     sp.heating, sp.cooling, out.info.electric_power, out.reward, out.info.range.low,
                     out.info.range.high});
  }
}

MetricsSummary run_episodes(env::HvacEnv& env, int n_episodes, std::uint64_t seed, const std::function<void()>& on_reset,
                            const Decide& decide, std::vector<TraceRow>* trace) {
  std::vector<EpisodeMetrics> episodes;
  for (int e = 0; e < n_episodes; ++e) {
    env::Observation obs = e == 0 ? env.reset(seed) : env.reset();
    if (on_reset) on_reset();
    MetricsAccumulator acc;
    while (!env.done()) {
      const auto out = env.step(decide(obs, env.view()));
      acc.add(out.reward, out.info);
      if (trace && e == 0) record_trace(env, env.steps_taken(), out, *trace);
      obs = out.observation;
    }
    episodes.push_back(acc.finish());
  }
  return MetricsSummary::from_episodes(std::move(episodes));
}

env::EnvConfig evaluation_config(const env::EnvConfig& cfg) {
  auto e = cfg;
  e.stochastic_weather = cfg.stochastic_weather && cfg.ou_in_eval;
  return e;
}

void say(const Progress& p, const std::string& msg) {
  if (p) p(msg);
}

}  // namespace

MetricsSummary evaluate(const env::EnvConfig& env_cfg, const drl::TrainedPolicy& policy, int n_episodes,
                        std::uint64_t eval_seed, std::vector<TraceRow>* trace) {
  if (policy.building != env_cfg.building)
    throw ShapeMismatch("policy was trained on '" + policy.building + "', environment is '" + env_cfg.building + "'");
  env::HvacEnv env(evaluation_config(env_cfg));
  if (policy.normalizer.size() != env.observation_size() || policy.actor.input_size() != env.observation_size() ||
      policy.action_dim != env.action_dim())
    throw ShapeMismatch("policy dimensions do not match building '" + env_cfg.building + "'");
  env.set_normalizer(policy.normalizer);
  env.freeze_normalizer(true);
  return run_episodes(
      env, n_episodes, eval_seed, {},
      [&](const env::Observation& obs, const env::ControllerView&) { return drl::act(policy, obs); }, trace);
}

MetricsSummary evaluate(const env::EnvConfig& env_cfg, controllers::Controller& controller, int n_episodes,
                        std::uint64_t eval_seed, std::vector<TraceRow>* trace) {
  env::HvacEnv env(evaluation_config(env_cfg));
  env.freeze_normalizer(true);
  return run_episodes(
      env, n_episodes, eval_seed, [&] { controller.reset(); },
      [&](const env::Observation& obs, const env::ControllerView& view) { return controller.act(obs, view); }, trace);
}

// --- training ----------------------------------------------------------------

TrainResult train(drl::Agent& agent, const env::EnvConfig& env_cfg, const TrainSchedule& schedule,
                  const TrainContext& ctx) {
  schedule.validate();
  env::HvacEnv env(env_cfg);
  if (ctx.normalizer) env.set_normalizer(*ctx.normalizer);
  if (env.observation_size() != agent.observation_dim() || env.action_dim() != agent.action_dim())
    throw ShapeMismatch("agent dimensions do not match building '" + env_cfg.building + "'");

  TrainResult result;
  bool have_best = false;
  for (int ep = 1; ep <= schedule.n_train_episodes; ++ep) {
    env::Observation obs = env.reset();
    MetricsAccumulator acc;
    while (!env.done()) {
      const Eigen::VectorXd a = agent.act(obs, false);
      auto out = env.step(env::action_from_unit(a));
      acc.add(out.reward, out.info);
      agent.observe({obs, a, out.reward, out.observation, false, out.done});
      obs = std::move(out.observation);
    }
    const auto metrics = acc.finish();
    result.log.push_back({ctx.phase, ep, metrics});
    say(ctx.progress, ctx.phase + " episode " + std::to_string(ep) + "/" + std::to_string(schedule.n_train_episodes) +
                          " mean reward " + format_number(metrics.mean_reward));

    if (ep % schedule.eval_frequency != 0) continue;
    auto policy = agent.snapshot(env_cfg.building, env.normalizer());
    const auto eval = evaluate(env_cfg, policy, schedule.eval_length, schedule.eval_seed);
    result.log.push_back({ctx.phase + "-eval", ep, eval.as_row()});
    if (!have_best || eval.mean_episode_reward > result.best_eval_reward) {
      have_best = true;
      result.best_eval_reward = eval.mean_episode_reward;
      result.best_policy = std::move(policy);
    }
    result.checkpoints.push_back({ep, eval.mean_episode_reward, result.best_eval_reward});
    say(ctx.progress, ctx.phase + " evaluation after episode " + std::to_string(ep) + ": " +
                          format_number(eval.mean_episode_reward) + " (best " +
                          format_number(result.best_eval_reward) + ")");
  }
  result.normalizer = env.normalizer();
  return result;
}

TrainResult train(const env::EnvConfig& env_cfg, const drl::AgentConfig& agent_cfg, const TrainSchedule& schedule,
                  const TrainContext& ctx) {
  env::HvacEnv probe(env_cfg);
  auto agent = drl::make_agent(agent_cfg, probe.observation_size(), probe.action_dim());
  return train(*agent, env_cfg, schedule, ctx);
}

CrossEvalResult cross_evaluate(const env::EnvConfig& base, const drl::AgentConfig& agent_cfg,
                               const TrainSchedule& schedule, const Progress& progress) {
  CrossEvalResult out;
  for (auto train_climate : weather::kAllClimates) {
    auto cfg = base;
    cfg.climate = train_climate;
    out.training[train_climate] = train(cfg, agent_cfg, schedule, {std::string(weather::to_string(train_climate)), progress, {}});
  }
  const auto preset = building::parse_preset(base.building);
  for (auto eval_climate : weather::kAllClimates) {
    auto cfg = base;
    cfg.climate = eval_climate;
    for (auto train_climate : weather::kAllClimates) {
      out.cells[{train_climate, eval_climate}] = evaluate(cfg, out.training[train_climate].best_policy,
                                                          schedule.final_eval_episodes, schedule.eval_seed);
      say(progress, "trained " + std::string(weather::to_string(train_climate)) + ", evaluated " +
                        std::string(weather::to_string(eval_climate)) + ": " +
                        format_number(out.cells[{train_climate, eval_climate}].mean_episode_reward));
    }
    auto rbc = controllers::make_controller("rbc", preset, schedule.seed);
    out.rbc[eval_climate] = evaluate(cfg, *rbc, schedule.final_eval_episodes, schedule.eval_seed);
  }
  return out;
}

CurriculumResult curriculum_train(const env::EnvConfig& base, const drl::AgentConfig& agent_cfg,
                                  const std::vector<weather::Climate>& order, const TrainSchedule& schedule,
                                  const CurriculumOptions& options, const Progress& progress) {
  if (order.empty() || order.size() > 3) throw ConfigError("curriculum.order", "needs one to three climates");
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      if (order[i] == order[j]) throw ConfigError("curriculum.order", "climates must not repeat");
  if (options.episodes_per_phase < 0) throw ConfigError("curriculum.episodes_per_phase", "must be >= 0");

  auto phase_schedule = schedule;
  if (options.episodes_per_phase > 0) {
    phase_schedule.n_train_episodes = options.episodes_per_phase;
    phase_schedule.eval_frequency = std::min(schedule.eval_frequency, options.episodes_per_phase);
  }
  env::HvacEnv probe(base);
  auto agent = drl::make_agent(agent_cfg, probe.observation_size(), probe.action_dim());

  CurriculumResult out;
  out.order = order;
  std::optional<env::MinMaxNormalizer> normalizer;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && options.clear_buffer) agent->clear_experience();
    auto cfg = base;
    cfg.climate = order[i];
    out.phases.push_back(train(*agent, cfg, phase_schedule, {std::string(weather::to_string(order[i])), progress, normalizer}));
    normalizer = out.phases.back().normalizer;
  }
  out.policy = out.phases.back().best_policy;
  return out;
}

std::vector<TradeoffCell> tradeoff_sweep(const env::EnvConfig& base, const drl::AgentConfig& agent_cfg,
                                         const std::vector<double>& omegas, const TrainSchedule& schedule,
                                         const Progress& progress) {
  for (double w : omegas)
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("tradeoff.omegas", "every weight must lie in [0, 1]");
  std::vector<TradeoffCell> cells;
  for (double w : omegas) {
    auto cfg = base;
    cfg.reward.omega = w;
    TradeoffCell cell;
    cell.omega = w;
    cell.training = train(cfg, agent_cfg, schedule, {"omega=" + format_number(w), progress, {}});
    cell.evaluation = evaluate(cfg, cell.training.best_policy, schedule.final_eval_episodes, schedule.eval_seed);
    say(progress, "omega " + format_number(w) + ": violation " + format_number(cell.evaluation.comfort_violation_pct) +
                      " %, power " + format_number(cell.evaluation.mean_power_demand) + " W");
    cells.push_back(std::move(cell));
  }
  return cells;
}

// --- CSV -----------------------------------------------------------------------

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_metrics_csv(const std::filesystem::path& path, const std::string& run_id, const std::vector<LogRow>& rows) {
  auto out = open_csv(path);
  out << "run_id,phase,episode,mean_reward,mean_power_w,comfort_violation_pct,mean_violation_degc\n";
  for (const auto& r : rows)
    out << run_id << ',' << r.phase << ',' << r.episode << ',' << format_number(r.metrics.mean_reward) << ','
        << format_number(r.metrics.mean_power_w) << ',' << format_number(r.metrics.comfort_violation_pct) << ','
        << format_number(r.metrics.mean_violation_degc) << '\n';
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows) {
  auto out = open_csv(path);
  out << "step,datetime,outdoor_c,zone,zone_temp_c,heating_sp,cooling_sp,power_w,reward,comfort_low_c,comfort_high_c\n";
  for (const auto& r : rows)
    out << r.step << ',' << r.time.to_string() << ',' << format_number(r.outdoor_c) << ',' << r.zone << ','
        << format_number(r.zone_temp_c) << ',' << format_number(r.heating_sp) << ',' << format_number(r.cooling_sp)
        << ',' << format_number(r.power_w) << ',' << format_number(r.reward) << ',' << format_number(r.comfort_low)
        << ',' << format_number(r.comfort_high) << '\n';
}

void write_crosseval_csv(const std::filesystem::path& path, const CrossEvalResult& result) {
  auto out = open_csv(path);
  out << "train_climate,eval_climate,mean_reward,sd_reward\n";
  for (auto t : weather::kAllClimates)
    for (auto e : weather::kAllClimates) {
      const auto it = result.cells.find({t, e});
      if (it == result.cells.end()) continue;
      out << weather::to_string(t) << ',' << weather::to_string(e) << ',' << format_number(it->second.mean_episode_reward)
          << ',' << format_number(it->second.sd_episode_reward) << '\n';
    }
}

void write_baseline_csv(const std::filesystem::path& path, const CrossEvalResult& result) {
  auto out = open_csv(path);
  out << "controller,eval_climate,mean_reward,sd_reward\n";
  for (auto e : weather::kAllClimates) {
    const auto it = result.rbc.find(e);
    if (it == result.rbc.end()) continue;
    out << "rbc," << weather::to_string(e) << ',' << format_number(it->second.mean_episode_reward) << ','
        << format_number(it->second.sd_episode_reward) << '\n';
  }
}

std::vector<LogRow> prefixed(const std::vector<LogRow>& rows, const std::string& prefix) {
  auto out = rows;
  for (auto& r : out) r.phase = prefix + "/" + r.phase;
  return out;
}

std::vector<LogRow> summary_rows(const std::string& phase, const MetricsSummary& summary) {
  std::vector<LogRow> rows;
  for (std::size_t i = 0; i < summary.episodes.size(); ++i) rows.push_back({phase, static_cast<int>(i + 1), summary.episodes[i]});
  return rows;
}

}  // namespace thermoarena::experiments

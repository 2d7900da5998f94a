#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thermoarena/controllers.hpp"
#include "thermoarena/drl/agent.hpp"
#include "thermoarena/env.hpp"

namespace thermoarena::experiments {

struct TrainSchedule {
  int n_train_episodes = 20;
  int eval_frequency = 4;   // evaluate after every this many training episodes
  int eval_length = 3;      // deterministic episodes per evaluation
  int final_eval_episodes = 20;
  std::uint64_t seed = 42;
  std::uint64_t eval_seed = 7919;  // weather perturbations during evaluation

  int checkpoint_count() const { return n_train_episodes / eval_frequency; }
  void validate() const;
  /// Reads section `schedule`.
  static TrainSchedule from_tree(const config::Tree& tree);
  void to_tree(config::Tree& tree) const;
};

struct EpisodeMetrics {
  double mean_reward = 0.0;
  double mean_power_w = 0.0;
  double comfort_violation_pct = 0.0;  // share of steps with any zone out of range
  double mean_violation_degc = 0.0;    // zone-summed deviation, averaged over all steps
  long steps = 0;

  bool operator==(const EpisodeMetrics&) const = default;
};

class MetricsAccumulator {
 public:
  void add(double reward, const env::StepInfo& info);
  EpisodeMetrics finish() const;

 private:
  double reward_ = 0.0;
  double power_ = 0.0;
  double deviation_ = 0.0;
  long violations_ = 0;
  long steps_ = 0;
};

struct MetricsSummary {
  double mean_episode_reward = 0.0;
  double sd_episode_reward = 0.0;
  double mean_power_demand = 0.0;
  double comfort_violation_pct = 0.0;
  double mean_violation_degc = 0.0;
  std::vector<EpisodeMetrics> episodes;

  static MetricsSummary from_episodes(std::vector<EpisodeMetrics> episodes);
  /// Episode-averaged metrics as one row.
  EpisodeMetrics as_row() const;
};

/// One line of metrics.csv.
struct LogRow {
  std::string phase;
  int episode = 0;
  EpisodeMetrics metrics;
};

/// One line of trace.csv (one zone at one step).
struct TraceRow {
  int step = 0;
  Timestamp time;
  double outdoor_c = 0.0;
  std::string zone;
  double zone_temp_c = 0.0;
  double heating_sp = 0.0;
  double cooling_sp = 0.0;
  double power_w = 0.0;
  double reward = 0.0;
  double comfort_low = 0.0;
  double comfort_high = 0.0;
};

struct EvalCheckpoint {
  int after_episode = 0;
  double mean_reward = 0.0;
  double best_so_far = 0.0;
};

using Progress = std::function<void(const std::string&)>;

struct TrainResult {
  drl::TrainedPolicy best_policy;
  double best_eval_reward = 0.0;
  std::vector<LogRow> log;
  std::vector<EvalCheckpoint> checkpoints;
  env::MinMaxNormalizer normalizer;  // training tracker after the last episode
};

struct TrainContext {
  std::string phase = "train";
  Progress progress;
  std::optional<env::MinMaxNormalizer> normalizer;  // carried from an earlier phase
};

/// Fresh agent; seeds come from the configs.
TrainResult train(const env::EnvConfig& env_cfg, const drl::AgentConfig& agent_cfg, const TrainSchedule& schedule,
                  const TrainContext& ctx = {});
/// Continues training `agent` in a new environment.
TrainResult train(drl::Agent& agent, const env::EnvConfig& env_cfg, const TrainSchedule& schedule,
                  const TrainContext& ctx = {});

/// Deterministic roll-outs. The first episode is reseeded with `eval_seed`;
/// `trace` receives the first episode when given.
MetricsSummary evaluate(const env::EnvConfig& env_cfg, const drl::TrainedPolicy& policy, int n_episodes,
                        std::uint64_t eval_seed, std::vector<TraceRow>* trace = nullptr);
MetricsSummary evaluate(const env::EnvConfig& env_cfg, controllers::Controller& controller, int n_episodes,
                        std::uint64_t eval_seed, std::vector<TraceRow>* trace = nullptr);

struct CrossEvalResult {
  std::map<std::pair<weather::Climate, weather::Climate>, MetricsSummary> cells;  // (train, eval)
  std::map<weather::Climate, MetricsSummary> rbc;                                 // by eval climate
  std::map<weather::Climate, TrainResult> training;

  bool complete() const { return cells.size() == 9; }
};

CrossEvalResult cross_evaluate(const env::EnvConfig& base, const drl::AgentConfig& agent_cfg,
                               const TrainSchedule& schedule, const Progress& progress = {});

struct CurriculumOptions {
  bool clear_buffer = false;
  int episodes_per_phase = 0;  // 0: the schedule's n_train_episodes
};

struct CurriculumResult {
  drl::TrainedPolicy policy;
  std::vector<weather::Climate> order;
  std::vector<TrainResult> phases;
};

CurriculumResult curriculum_train(const env::EnvConfig& base, const drl::AgentConfig& agent_cfg,
                                  const std::vector<weather::Climate>& order, const TrainSchedule& schedule,
                                  const CurriculumOptions& options = {}, const Progress& progress = {});

inline const std::vector<double> kDefaultOmegas = {0.25, 0.5, 0.75, 1.0};
inline const std::vector<double> kExtendedOmegas = {0.25, 0.5, 0.75, 0.95, 0.97, 0.99, 1.0};

struct TradeoffCell {
  double omega = 0.0;
  TrainResult training;
  MetricsSummary evaluation;
};

std::vector<TradeoffCell> tradeoff_sweep(const env::EnvConfig& base, const drl::AgentConfig& agent_cfg,
                                         const std::vector<double>& omegas, const TrainSchedule& schedule,
                                         const Progress& progress = {});

// --- CSV ---------------------------------------------------------------------

/// Shortest round-trip decimal form.
std::string format_number(double value);

void write_metrics_csv(const std::filesystem::path& path, const std::string& run_id, const std::vector<LogRow>& rows);
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows);
/// The 3x3 matrix, one row per (train, eval) cell.
void write_crosseval_csv(const std::filesystem::path& path, const CrossEvalResult& result);
/// Rule-based reference per evaluation climate.
void write_baseline_csv(const std::filesystem::path& path, const CrossEvalResult& result);

/// Rows prefixed with `phase/`.
std::vector<LogRow> prefixed(const std::vector<LogRow>& rows, const std::string& prefix);
std::vector<LogRow> summary_rows(const std::string& phase, const MetricsSummary& summary);

}  // namespace thermoarena::experiments

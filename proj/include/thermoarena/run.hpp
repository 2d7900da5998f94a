#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "thermoarena/drl/agent.hpp"
#include "thermoarena/env.hpp"
#include "thermoarena/experiments.hpp"

namespace thermoarena::run {

/// Everything one config file determines. Top-level keys configure the
/// environment; `[agent]`, `[schedule]`, `[curriculum]` and `[tradeoff]` the rest.
struct RunConfig {
  env::EnvConfig env;
  drl::AgentConfig agent;
  experiments::TrainSchedule schedule;
  std::vector<weather::Climate> curriculum_order = {weather::Climate::cool_marine, weather::Climate::mixed_humid,
                                                    weather::Climate::hot_dry};
  experiments::CurriculumOptions curriculum;
  std::vector<double> omegas = experiments::kDefaultOmegas;

  /// The top-level `seed` (or set_seed) drives environment, agent and schedule alike.
  void set_seed(std::uint64_t seed);
  std::uint64_t seed() const { return schedule.seed; }

  void validate() const;
  static RunConfig from_tree(const config::Tree& tree);
  static RunConfig from_ini(const std::string& text, const std::string& source = "<config>");
  void to_tree(config::Tree& tree) const;
  /// Resolved configuration, every key spelled out.
  std::string to_ini() const;
};

/// Reads an INI config or the `config` snapshot inside a run manifest (.json).
RunConfig load_config(const std::filesystem::path& path);

std::vector<weather::Climate> parse_climate_list(const std::string& text, const std::string& field);
std::vector<double> parse_number_list(const std::string& text, const std::string& field);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a(const std::string& text);

/// `<command>-<building>-<climate>-<algorithm>-s<seed>-<hash>`; a pure function of its inputs.
std::string make_run_id(const std::string& command, const RunConfig& cfg, const std::string& extra = "");

/// Output root: `--out`, else $THERMOARENA_OUT, else ./runs.
std::filesystem::path output_root(const std::string& out_flag);

/// Creates `root/run_id`, or `root/run_id-2`, `-3`, ... when taken.
std::filesystem::path fresh_run_dir(const std::filesystem::path& root, const std::string& run_id);

std::string utc_now();

/// manifest.json of one run directory. Written when the run starts and again when it ends.
class Manifest {
 public:
  Manifest(std::filesystem::path dir, std::string run_id, std::string command, const RunConfig& cfg);

  void add_artifact(const std::string& name, const std::filesystem::path& relative);
  void set_extra(const std::string& key, const std::string& value);
  /// Initial write; also snapshots config.ini into the run directory.
  void begin();
  void finish(const std::string& status = "completed");

  const std::filesystem::path& dir() const { return dir_; }
  const std::string& run_id() const { return run_id_; }

 private:
  void write() const;

  std::filesystem::path dir_;
  std::string run_id_;
  std::string command_;
  std::string config_ini_;
  std::uint64_t seed_;
  std::map<std::string, std::string> artifacts_;
  std::map<std::string, std::string> extra_;
  std::string started_;
  std::string finished_;
  std::string status_ = "running";
};

}  // namespace thermoarena::run

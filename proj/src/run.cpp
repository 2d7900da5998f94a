#include "thermoarena/run.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace thermoarena::run {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text, const std::string& field) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(field, "empty list entry in '" + text + "'");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError(field, "list is empty");
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::vector<weather::Climate> parse_climate_list(const std::string& text, const std::string& field) {
  std::vector<weather::Climate> out;
  for (const auto& item : split_list(text, field)) {
    try {
      out.push_back(weather::parse_climate(item));
    } catch (const ConfigError& e) {
      throw ConfigError(field, "unknown climate '" + item + "'");
    }
  }
  return out;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  for (const auto& item : split_list(text, field)) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size()) throw ConfigError(field, "not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void RunConfig::set_seed(std::uint64_t seed) {
  env.seed = seed;
  agent.seed = seed;
  schedule.seed = seed;
}

void RunConfig::validate() const {
  env.validate();
  agent.validate();
  schedule.validate();
  if (curriculum_order.empty() || curriculum_order.size() > 3)
    throw ConfigError("curriculum.order", "needs one to three climates");
  for (std::size_t i = 0; i < curriculum_order.size(); ++i)
    for (std::size_t j = i + 1; j < curriculum_order.size(); ++j)
      if (curriculum_order[i] == curriculum_order[j]) throw ConfigError("curriculum.order", "climates must not repeat");
  if (curriculum.episodes_per_phase < 0) throw ConfigError("curriculum.episodes_per_phase", "must be >= 0");
  if (omegas.empty()) throw ConfigError("tradeoff.omegas", "list is empty");
  for (double w : omegas)
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("tradeoff.omegas", "every weight must lie in [0, 1]");
}

RunConfig RunConfig::from_tree(const config::Tree& t) {
  config::reject_unknown(t, "",
                         {"building", "climate", "weather_file", "episode_length_steps", "timestep_s", "seed",
                          "weather_seed", "initial_zone_temp_c", "data_dir", "stochastic_weather", "reward", "agent",
                          "schedule", "curriculum", "tradeoff"});
  config::reject_unknown(t, "curriculum", {"order", "clear_buffer", "episodes_per_phase"});
  config::reject_unknown(t, "tradeoff", {"omegas"});

  RunConfig c;
  c.env = env::EnvConfig::from_tree(t);
  c.agent = drl::AgentConfig::from_tree(t);
  c.schedule = experiments::TrainSchedule::from_tree(t);
  if (const auto seed = t.get_optional<std::string>("seed"); seed && !seed->empty()) {
    const auto s = config::get<std::uint64_t>(t, "seed");
    if (!t.get_optional<std::string>("agent.seed")) c.agent.seed = s;
    if (!t.get_optional<std::string>("schedule.seed")) c.schedule.seed = s;
  }
  if (auto order = t.get_optional<std::string>("curriculum.order"); order && !order->empty())
    c.curriculum_order = parse_climate_list(*order, "curriculum.order");
  c.curriculum.clear_buffer = config::get_or<bool>(t, "curriculum.clear_buffer", false);
  c.curriculum.episodes_per_phase = config::get_or<int>(t, "curriculum.episodes_per_phase", 0);
  if (auto omegas = t.get_optional<std::string>("tradeoff.omegas"); omegas && !omegas->empty())
    c.omegas = parse_number_list(*omegas, "tradeoff.omegas");
  c.validate();
  return c;
}

RunConfig RunConfig::from_ini(const std::string& text, const std::string& source) {
  return from_tree(config::parse_ini(text, source));
}

void RunConfig::to_tree(config::Tree& t) const {
  env.to_tree(t);
  agent.to_tree(t);
  schedule.to_tree(t);
  std::string order;
  for (std::size_t i = 0; i < curriculum_order.size(); ++i)
    order += (i ? "," : "") + std::string(weather::to_string(curriculum_order[i]));
  t.put("curriculum.order", order);
  t.put("curriculum.clear_buffer", curriculum.clear_buffer ? "true" : "false");
  t.put("curriculum.episodes_per_phase", curriculum.episodes_per_phase);
  std::string list;
  for (std::size_t i = 0; i < omegas.size(); ++i) list += (i ? "," : "") + experiments::format_number(omegas[i]);
  t.put("tradeoff.omegas", list);
}

std::string RunConfig::to_ini() const {
  config::Tree t;
  to_tree(t);
  return config::write_ini(t);
}

RunConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError(path.string(), "config file not found");
  if (path.extension() != ".json") return RunConfig::from_tree(config::read_ini_file(path.string()));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "thermoarena-run" || !j.contains("config") || !j["config"].is_string())
    throw ConfigError(path.string(), "not a run manifest");
  return RunConfig::from_ini(j["config"].get<std::string>(), path.string());
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string make_run_id(const std::string& command, const RunConfig& cfg, const std::string& extra) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a(command + '\n' + cfg.to_ini() + '\n' + extra)));
  return command + '-' + cfg.env.building + '-' + std::string(weather::to_string(cfg.env.climate)) + '-' +
         drl::to_string(cfg.agent.algorithm) + "-s" + std::to_string(cfg.seed()) + '-' + std::string(hash, 8);
}

std::filesystem::path output_root(const std::string& out_flag) {
  if (!out_flag.empty()) return out_flag;
  if (const char* env = std::getenv("THERMOARENA_OUT"); env && *env) return env;
  return "runs";
}

std::filesystem::path fresh_run_dir(const std::filesystem::path& root, const std::string& run_id) {
  std::filesystem::create_directories(root);
  for (int n = 1;; ++n) {
    auto dir = root / (n == 1 ? run_id : run_id + "-" + std::to_string(n));
    if (std::filesystem::create_directory(dir)) return dir;
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Manifest::Manifest(std::filesystem::path dir, std::string run_id, std::string command, const RunConfig& cfg)
    : dir_(std::move(dir)),
      run_id_(std::move(run_id)),
      command_(std::move(command)),
      config_ini_(cfg.to_ini()),
      seed_(cfg.seed()) {}

void Manifest::add_artifact(const std::string& name, const std::filesystem::path& relative) {
  artifacts_[name] = relative.generic_string();
}

void Manifest::set_extra(const std::string& key, const std::string& value) { extra_[key] = value; }

void Manifest::begin() {
  started_ = utc_now();
  write_text(dir_ / "config.ini", config_ini_);
  artifacts_["config"] = "config.ini";
  write();
}

void Manifest::finish(const std::string& status) {
  finished_ = utc_now();
  status_ = status;
  write();
}

void Manifest::write() const {
  nlohmann::ordered_json j;
  j["format"] = "thermoarena-run";
  j["version"] = 1;
  j["run_id"] = run_id_;
  j["command"] = command_;
  j["seed"] = seed_;
  j["tool_version"] = THERMOARENA_VERSION;
  j["config"] = config_ini_;
  j["artifacts"] = artifacts_;
  for (const auto& [k, v] : extra_) j["options"][k] = v;
  j["started_at"] = started_;
  j["finished_at"] = finished_.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(finished_);
  j["status"] = status_;
  write_text(dir_ / "manifest.json", j.dump(2) + "\n");
}

}  // namespace thermoarena::run

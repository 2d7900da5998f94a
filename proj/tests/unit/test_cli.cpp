#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "thermoarena/errors.hpp"
#include "thermoarena/plot.hpp"
#include "thermoarena/run.hpp"

using namespace thermoarena;
namespace fs = std::filesystem;

namespace {

const char* const kTiny = R"(building = five_zone
climate = hot_dry
episode_length_steps = 96
seed = 5

[agent]
algorithm = sac
hidden = 16,16
batch_size = 16
learning_starts = 32
train_freq = 4

[schedule]
n_train_episodes = 2
eval_frequency = 1
eval_length = 1
final_eval_episodes = 1
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Scratch directory removed on scope exit.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("thermoarena_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name, std::ios::binary) << text;
    return dir / name;
  }
};

int thermoarena_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "thermoarena");
  return cli::run(args);
}

std::vector<fs::path> run_dirs(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("run config parses, validates and round-trips through its snapshot") {
  const auto cfg = run::RunConfig::from_ini(kTiny);
  CHECK(cfg.env.episode_length_steps == 96);
  CHECK(cfg.agent.hidden == std::vector<int>{16, 16});
  CHECK(cfg.schedule.n_train_episodes == 2);
  CHECK(cfg.seed() == 5);
  CHECK(cfg.agent.seed == 5);
  const auto back = run::RunConfig::from_ini(cfg.to_ini());
  CHECK(back.to_ini() == cfg.to_ini());
  CHECK(back.agent == cfg.agent);
  CHECK(run::make_run_id("train", back) == run::make_run_id("train", cfg));
}

TEST_CASE("unknown keys and sections name the offending field") {
  try {
    run::RunConfig::from_ini("seed = 1\n[agent]\nlearnig_rate = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("learnig_rate") != std::string::npos);
  }
  CHECK_THROWS_AS(run::RunConfig::from_ini(std::string(kTiny) + "[extras]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(run::RunConfig::from_ini("colour = blue\n"), ConfigError);
  CHECK_THROWS_AS(run::RunConfig::from_ini("building = igloo\n"), Error);
  CHECK_THROWS_AS(run::RunConfig::from_ini("[schedule]\nn_train_episodes = 2\neval_frequency = 3\n"), ConfigError);
}

TEST_CASE("an explicit agent seed wins over the top-level seed") {
  const auto cfg = run::RunConfig::from_ini("seed = 3\n[agent]\nseed = 9\n");
  CHECK(cfg.agent.seed == 9);
  CHECK(cfg.schedule.seed == 3);
  auto c = cfg;
  c.set_seed(11);
  CHECK(c.agent.seed == 11);
  CHECK(c.seed() == 11);
}

TEST_CASE("list parsing") {
  using weather::Climate;
  CHECK(run::parse_climate_list("cool, mixed,hot", "f") ==
        std::vector<Climate>{Climate::cool_marine, Climate::mixed_humid, Climate::hot_dry});
  CHECK_THROWS_AS(run::parse_climate_list("cool,arctic", "f"), ConfigError);
  CHECK(run::parse_number_list("0.25, 0.5", "f") == std::vector<double>{0.25, 0.5});
  CHECK_THROWS_AS(run::parse_number_list("0.25,x", "f"), ConfigError);
}

TEST_CASE("run ids are pure functions of command and configuration") {
  const auto cfg = run::RunConfig::from_ini(kTiny);
  const auto id = run::make_run_id("train", cfg);
  CHECK(id.rfind("train-five_zone-hot_dry-sac-s5-", 0) == 0);
  CHECK(id.size() == std::string("train-five_zone-hot_dry-sac-s5-").size() + 8);
  CHECK(run::make_run_id("train", cfg) == id);
  CHECK(run::make_run_id("eval", cfg) != id);
  CHECK(run::make_run_id("train", cfg, "x") != id);
  auto other = cfg;
  other.set_seed(6);
  CHECK(run::make_run_id("train", other) != id);
  CHECK(run::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(run::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("fresh run directories never overwrite") {
  Scratch s("fresh");
  CHECK(run::fresh_run_dir(s.dir, "r").filename() == "r");
  CHECK(run::fresh_run_dir(s.dir, "r").filename() == "r-2");
  CHECK(run::fresh_run_dir(s.dir, "r").filename() == "r-3");
}

TEST_CASE("usage errors exit with 2, help with 0") {
  Scratch s("usage");
  CHECK(thermoarena_cli({"--help"}) == cli::kOk);
  CHECK(thermoarena_cli({"train", "--help"}) == cli::kOk);
  CHECK(thermoarena_cli({"--version"}) == cli::kOk);
  CHECK(thermoarena_cli({"frobnicate"}) == cli::kUsageError);
  CHECK(thermoarena_cli({"train", "--config", (s.dir / "missing.ini").string(), "--out", s.dir.string()}) == cli::kUsageError);
  const auto bad = s.write("bad.ini", "[agent]\nalgorithm = dqn\n");
  CHECK(thermoarena_cli({"train", "--config", bad.string(), "--out", s.dir.string(), "--quiet"}) == cli::kUsageError);
  const auto tiny = s.write("tiny.ini", kTiny);
  CHECK(thermoarena_cli({"eval", "--config", tiny.string(), "--out", s.dir.string(), "--quiet"}) == cli::kUsageError);
  CHECK(thermoarena_cli({"tradeoff", "--config", tiny.string(), "--omegas", "0.5,2", "--out", s.dir.string(), "--quiet"}) ==
        cli::kUsageError);
  CHECK(thermoarena_cli({"presets"}) == cli::kOk);
}

TEST_CASE("train writes a manifest that reproduces the run byte for byte") {
  Scratch s("train");
  const auto tiny = s.write("tiny.ini", kTiny);
  const auto out = s.dir / "runs";
  REQUIRE(thermoarena_cli({"train", "--config", tiny.string(), "--out", out.string(), "--quiet"}) == cli::kOk);
  auto dirs = run_dirs(out);
  REQUIRE(dirs.size() == 1);
  const auto first = dirs[0];
  for (const char* f : {"manifest.json", "config.ini", "metrics.csv", "trace.csv", "policy.json", "run.log"})
    CHECK(fs::exists(first / f));

  const auto manifest = nlohmann::json::parse(slurp(first / "manifest.json"));
  CHECK(manifest["status"] == "completed");
  CHECK(manifest["command"] == "train");
  CHECK(manifest["seed"] == 5);
  CHECK(manifest["run_id"] == first.filename().string());
  CHECK(!manifest["finished_at"].is_null());

  REQUIRE(thermoarena_cli({"train", "--config", (first / "manifest.json").string(), "--out", out.string(), "--quiet"}) ==
          cli::kOk);
  dirs = run_dirs(out);
  REQUIRE(dirs.size() == 2);
  const auto second = dirs[1];
  CHECK(second.filename() == first.filename().string() + "-2");
  CHECK(slurp(first / "metrics.csv") == slurp(second / "metrics.csv"));
  CHECK(slurp(first / "policy.json") == slurp(second / "policy.json"));
  CHECK(slurp(first / "config.ini") == slurp(second / "config.ini"));

  SUBCASE("the checkpoint evaluates and refuses another building") {
    const auto policy = (first / "policy.json").string();
    CHECK(thermoarena_cli({"eval", "--config", tiny.string(), "--checkpoint", policy, "--out", out.string(), "--quiet"}) ==
          cli::kOk);
    CHECK(thermoarena_cli({"eval", "--config", tiny.string(), "--checkpoint", policy, "--building", "two_zone_datacenter",
               "--out", out.string(), "--quiet"}) == cli::kUsageError);
  }
  SUBCASE("metrics and traces plot deterministically") {
    const auto svg_a = s.dir / "a.svg", svg_b = s.dir / "b.svg";
    REQUIRE(thermoarena_cli({"plot", (first / "metrics.csv").string(), "-o", svg_a.string()}) == cli::kOk);
    REQUIRE(thermoarena_cli({"plot", (second / "metrics.csv").string(), "-o", svg_b.string()}) == cli::kOk);
    const auto a = slurp(svg_a);
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a == slurp(svg_b));
    CHECK(thermoarena_cli({"plot", (first / "trace.csv").string(), "--out", s.dir.string()}) == cli::kOk);
    CHECK(fs::exists(s.dir / "trace.svg"));
  }
}

TEST_CASE("plot rejects empty or unknown CSV input") {
  Scratch s("plot");
  const auto empty = s.write("empty.csv", "");
  const auto header_only = s.write("metrics.csv", "run_id,phase,episode,mean_reward,mean_power_w,"
                                                   "comfort_violation_pct,mean_violation_degc\n");
  const auto odd = s.write("odd.csv", "a,b\n1,2\n");
  CHECK(thermoarena_cli({"plot", empty.string()}) == cli::kUsageError);
  CHECK(thermoarena_cli({"plot", header_only.string()}) == cli::kUsageError);
  CHECK(thermoarena_cli({"plot", odd.string()}) == cli::kUsageError);
  CHECK_THROWS_AS(plot::render(empty), ConfigError);
}

TEST_CASE("baseline evaluation through the CLI") {
  Scratch s("baseline");
  const auto tiny = s.write("tiny.ini", kTiny);
  REQUIRE(thermoarena_cli({"eval", "--config", tiny.string(), "--controller", "rbc", "--episodes", "1", "--out",
               s.dir.string(), "--quiet"}) == cli::kOk);
  const auto dirs = run_dirs(s.dir);
  REQUIRE(dirs.size() == 1);
  const auto metrics = slurp(dirs[0] / "metrics.csv");
  CHECK(metrics.find(",eval,1,") != std::string::npos);
  CHECK(thermoarena_cli({"eval", "--config", tiny.string(), "--controller", "pid", "--out", s.dir.string(), "--quiet"}) ==
        cli::kUsageError);
}

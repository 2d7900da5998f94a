#include "thermoarena/drl/checkpoint.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace thermoarena::drl {

using nlohmann::json;

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string to_json(const TrainedPolicy& policy) {
  config::Tree tree;
  policy.config.to_tree(tree);
  json agent = json::object();
  for (const auto& [key, node] : tree.get_child("agent")) agent[key] = node.data();
  json j{{"format", "thermoarena-policy"},
         {"version", kCheckpointVersion},
         {"building", policy.building},
         {"action_dim", policy.action_dim},
         {"layer_sizes", policy.actor.sizes()},
         {"parameters", to_vector(policy.actor.parameters())},
         {"normalizer_lower", to_vector(policy.normalizer.lower())},
         {"normalizer_upper", to_vector(policy.normalizer.upper())},
         {"agent", agent}};
  return j.dump(1);
}

TrainedPolicy policy_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("checkpoint", std::string("not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "thermoarena-policy") throw ConfigError("checkpoint.format", "not a policy checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw ConfigError("checkpoint.version", "unsupported version " + j.at("version").dump());
    config::Tree tree;
    for (const auto& [key, value] : j.at("agent").items()) tree.put("agent." + key, value.get<std::string>());
    TrainedPolicy p;
    p.config = AgentConfig::from_tree(tree);
    p.building = j.at("building").get<std::string>();
    p.action_dim = j.at("action_dim").get<int>();
    p.actor = DenseNetd(j.at("layer_sizes").get<std::vector<int>>());
    const auto params = from_vector(j.at("parameters").get<std::vector<double>>());
    if (params.size() != p.actor.parameter_count())
      throw ConfigError("checkpoint.parameters", "parameter count does not match layer sizes");
    p.actor.parameters() = params;
    p.normalizer = env::MinMaxNormalizer(from_vector(j.at("normalizer_lower").get<std::vector<double>>()),
                                         from_vector(j.at("normalizer_upper").get<std::vector<double>>()));
    if (p.normalizer.size() != p.actor.input_size())
      throw ConfigError("checkpoint.normalizer_lower", "normalizer size does not match the network input");
    return p;
  } catch (const json::exception& e) {
    throw ConfigError("checkpoint", std::string("malformed: ") + e.what());
  }
}

void save_policy(const TrainedPolicy& policy, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out << to_json(policy) << '\n';
}

TrainedPolicy load_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("checkpoint", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return policy_from_json(ss.str());
}

}  // namespace thermoarena::drl

#pragma once

#include <filesystem>
#include <string>

#include "thermoarena/drl/agent.hpp"

namespace thermoarena::drl {

inline constexpr int kCheckpointVersion = 1;

/// JSON text container: version, building, layer sizes, flat parameters,
/// normalization bounds and the producing AgentConfig.
std::string to_json(const TrainedPolicy& policy);
TrainedPolicy policy_from_json(const std::string& text);

void save_policy(const TrainedPolicy& policy, const std::filesystem::path& path);
TrainedPolicy load_policy(const std::filesystem::path& path);

}  // namespace thermoarena::drl

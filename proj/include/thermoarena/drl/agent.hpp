#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "thermoarena/config.hpp"
#include "thermoarena/drl/dense_net.hpp"
#include "thermoarena/env.hpp"

namespace thermoarena::drl {

enum class Algorithm { sac, td3, ppo };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm a);

/// Hyperparameters for one agent. `defaults()` returns the published defaults:
/// PPO lr 1e-3, n_steps 4096, batch 128, 15 epochs, gamma 0.9, gae_lambda 0.9;
/// SAC lr 3e-4, buffer 1e6, batch 256, tau 0.005, gamma 0.99;
/// TD3 lr 3e-3, buffer 1e6, batch 64, tau 0.005, gamma 0.9.
struct AgentConfig {
  Algorithm algorithm = Algorithm::sac;
  double learning_rate = 3e-4;
  std::size_t buffer_size = 1'000'000;
  int batch_size = 256;
  double gamma = 0.99;
  double tau = 0.005;
  std::vector<int> hidden = {256, 256};

  // off-policy schedule
  int learning_starts = 100;
  int train_freq = 1;
  int gradient_steps = 1;

  // SAC
  double init_ent_coef = 1.0;
  bool auto_entropy = true;

  // TD3
  int policy_delay = 2;
  double target_noise = 0.2;
  double target_noise_clip = 0.5;
  double exploration_noise = 0.1;

  // PPO
  int n_steps = 4096;
  int n_epochs = 15;
  double gae_lambda = 0.9;
  double clip_range = 0.2;
  double ent_coef = 0.0;
  double vf_coef = 0.5;
  double max_grad_norm = 0.5;

  std::uint64_t seed = 42;

  static AgentConfig defaults(Algorithm algorithm);
  void validate() const;
  /// Reads section `agent`; unspecified keys keep the algorithm defaults.
  static AgentConfig from_tree(const config::Tree& tree);
  void to_tree(config::Tree& tree) const;
  bool operator==(const AgentConfig&) const = default;
};

struct Transition {
  Eigen::VectorXd obs;
  Eigen::VectorXd action;  // squashed, in [-1, 1]
  double reward = 0.0;
  Eigen::VectorXd next_obs;
  bool done = false;       // terminal: no bootstrap through next_obs
  bool truncated = false;  // episode cut by time limit
};

/// Column-major minibatch, one transition per column.
struct Batch {
  Eigen::MatrixXd obs;
  Eigen::MatrixXd actions;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd next_obs;
  Eigen::VectorXd dones;

  Eigen::Index size() const { return rewards.size(); }
};

/// Ring buffer with uniform sampling.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int obs_dim, int act_dim);

  void add(const Transition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  void clear();

  Batch sample(int batch_size, std::mt19937_64& rng) const;
  Batch gather(const std::vector<std::size_t>& slots) const;
  /// Transition stored in `slot` (0 <= slot < size()).
  Transition at(std::size_t slot) const;

 private:
  std::size_t capacity_;
  int obs_dim_;
  int act_dim_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  std::vector<double> obs_, actions_, rewards_, next_obs_, dones_;
};

/// Deterministic policy extracted from an agent, plus what is needed to feed it.
struct TrainedPolicy {
  AgentConfig config;
  std::string building;
  int action_dim = 0;
  DenseNetd actor;  // first action_dim outputs are the pre-squash mean
  env::MinMaxNormalizer normalizer;

  /// tanh(mean) for a normalized observation.
  Eigen::VectorXd act(const Eigen::Ref<const Eigen::VectorXd>& obs) const;
  bool operator==(const TrainedPolicy& o) const {
    return config == o.config && building == o.building && action_dim == o.action_dim && actor == o.actor &&
           normalizer.lower() == o.normalizer.lower() && normalizer.upper() == o.normalizer.upper();
  }
};

class Agent {
 public:
  virtual ~Agent() = default;

  /// Squashed action in [-1, 1]^action_dim for a normalized observation.
  virtual Eigen::VectorXd act(const Eigen::Ref<const Eigen::VectorXd>& obs, bool deterministic) = 0;
  /// Feed back the outcome of the last act(); may trigger gradient updates.
  virtual void observe(const Transition& t) = 0;
  /// Drop stored experience (replay buffer or partial rollout).
  virtual void clear_experience() = 0;

  virtual const AgentConfig& config() const = 0;
  virtual const DenseNetd& actor() const = 0;
  virtual long updates() const = 0;
  virtual int observation_dim() const = 0;
  virtual int action_dim() const = 0;

  TrainedPolicy snapshot(const std::string& building, const env::MinMaxNormalizer& normalizer) const;
};

/// {in, hidden..., out}
std::vector<int> mlp_sizes(int in, const std::vector<int>& hidden, int out);

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg, int obs_dim, int act_dim);

/// Maps a squashed policy output onto setpoints.
env::Action act(const TrainedPolicy& policy, const Eigen::Ref<const Eigen::VectorXd>& obs);

}  // namespace thermoarena::drl

#pragma once

#include <random>

#include "thermoarena/drl/adam.hpp"
#include "thermoarena/drl/agent.hpp"

namespace thermoarena::drl {

/// Diagonal Gaussian over pre-squash actions u; the env sees tanh(u).
double gaussian_log_prob(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& mean,
                         const Eigen::Ref<const Eigen::VectorXd>& log_std);

/// One on-policy rollout, one step per column.
struct Rollout {
  Eigen::MatrixXd obs;
  Eigen::MatrixXd pre_tanh;   // sampled u
  Eigen::VectorXd log_probs;  // under the behaviour policy
  Eigen::VectorXd values;
  Eigen::VectorXd rewards;    // truncation bootstrap already folded in
  Eigen::VectorXd dones;      // episode boundary after this step
  double last_value = 0.0;    // V(s) after the final step

  Eigen::Index size() const { return rewards.size(); }
};

struct PpoMinibatch {
  Eigen::MatrixXd obs;
  Eigen::MatrixXd pre_tanh;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
};

struct PpoLoss {
  double policy = 0.0;   // clipped surrogate, negated
  double value = 0.0;    // mean squared return error
  double entropy = 0.0;  // mean policy entropy
  double total = 0.0;    // policy - ent_coef * entropy + vf_coef * value
  double clip_fraction = 0.0;
  Eigen::VectorXd grad_actor;
  Eigen::VectorXd grad_log_std;
  Eigen::VectorXd grad_value;
};

PpoLoss ppo_loss(const DenseNetd& actor, const Eigen::VectorXd& log_std, const DenseNetd& value_net,
                 const PpoMinibatch& mb, const AgentConfig& cfg);

/// (a - mean) / std over the whole vector; unchanged when it has fewer than two entries.
Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& adv);

struct PpoLosses {
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
};

class PpoAgent final : public Agent {
 public:
  PpoAgent(AgentConfig cfg, int obs_dim, int act_dim);

  Eigen::VectorXd act(const Eigen::Ref<const Eigen::VectorXd>& obs, bool deterministic) override;
  void observe(const Transition& t) override;
  void clear_experience() override { filled_ = 0; }

  /// n_epochs passes over shuffled minibatches of a full rollout.
  PpoLosses update(const Rollout& rollout);

  const AgentConfig& config() const override { return cfg_; }
  const DenseNetd& actor() const override { return actor_; }
  long updates() const override { return updates_; }
  int observation_dim() const override { return obs_dim_; }
  int action_dim() const override { return act_dim_; }

  const DenseNetd& value_net() const { return value_; }
  const Eigen::VectorXd& log_std() const { return log_std_; }
  int rollout_fill() const { return filled_; }

 private:
  AgentConfig cfg_;
  int obs_dim_;
  int act_dim_;
  std::mt19937_64 rng_;
  DenseNetd actor_, value_;
  Eigen::VectorXd log_std_;
  AdamState<double> opt_;
  Rollout rollout_;
  int filled_ = 0;
  // behaviour sample from the last stochastic act()
  Eigen::VectorXd pending_u_;
  double pending_log_prob_ = 0.0;
  double pending_value_ = 0.0;
  long updates_ = 0;
};

}  // namespace thermoarena::drl

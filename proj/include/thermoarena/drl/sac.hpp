#pragma once

#include <random>

#include "thermoarena/drl/adam.hpp"
#include "thermoarena/drl/agent.hpp"
#include "thermoarena/drl/losses.hpp"

namespace thermoarena::drl {

/// Soft Bellman targets r + gamma (1 - d) (min_i Q_i'(s', a') - alpha log pi(a'|s')).
Eigen::VectorXd sac_targets(const DenseNetd& actor, const DenseNetd& q1_target, const DenseNetd& q2_target,
                            const Batch& batch, const Eigen::MatrixXd& next_noise, double alpha, double gamma);

struct SacActorLoss {
  double loss = 0.0;
  Eigen::VectorXd grad;
  double mean_log_prob = 0.0;
};

/// mean(alpha log pi(a|s) - min_i Q_i(s, a)) with a reparameterized by `noise`.
SacActorLoss sac_actor_loss(const DenseNetd& actor, const DenseNetd& q1, const DenseNetd& q2,
                            const Eigen::MatrixXd& obs, const Eigen::MatrixXd& noise, double alpha);

struct SacLosses {
  double critic = 0.0;
  double actor = 0.0;
  double alpha_loss = 0.0;
  double alpha = 0.0;
};

class SacAgent final : public Agent {
 public:
  SacAgent(AgentConfig cfg, int obs_dim, int act_dim);

  Eigen::VectorXd act(const Eigen::Ref<const Eigen::VectorXd>& obs, bool deterministic) override;
  void observe(const Transition& t) override;
  void clear_experience() override { buffer_.clear(); }

  /// One gradient step on a sampled batch.
  SacLosses update();
  /// One gradient step on the given batch.
  SacLosses update(const Batch& batch);

  const AgentConfig& config() const override { return cfg_; }
  const DenseNetd& actor() const override { return actor_; }
  long updates() const override { return updates_; }
  int observation_dim() const override { return obs_dim_; }
  int action_dim() const override { return act_dim_; }

  const DenseNetd& q1() const { return q1_; }
  const DenseNetd& q2() const { return q2_; }
  const DenseNetd& q1_target() const { return q1_target_; }
  const DenseNetd& q2_target() const { return q2_target_; }
  double alpha() const { return std::exp(log_alpha_(0)); }
  double target_entropy() const { return target_entropy_; }
  const ReplayBuffer& buffer() const { return buffer_; }

 private:
  Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols);

  AgentConfig cfg_;
  int obs_dim_;
  int act_dim_;
  std::mt19937_64 rng_;
  DenseNetd actor_, q1_, q2_, q1_target_, q2_target_;
  AdamState<double> actor_opt_, q1_opt_, q2_opt_, alpha_opt_;
  Eigen::VectorXd log_alpha_;
  double target_entropy_;
  ReplayBuffer buffer_;
  long steps_ = 0;
  long updates_ = 0;
};

}  // namespace thermoarena::drl

#pragma once

#include <random>

#include "thermoarena/drl/adam.hpp"
#include "thermoarena/drl/agent.hpp"
#include "thermoarena/drl/losses.hpp"

namespace thermoarena::drl {

/// Clipped double-Q targets r + gamma (1 - d) min_i Q_i'(s', a'), where
/// a' = clip(tanh(mu'(s')) + clip(noise, -noise_clip, noise_clip), -1, 1).
Eigen::VectorXd td3_targets(const DenseNetd& actor_target, const DenseNetd& q1_target, const DenseNetd& q2_target,
                            const Batch& batch, const Eigen::MatrixXd& noise, double noise_clip, double gamma);

struct Td3ActorLoss {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

/// -mean(Q1(s, tanh(mu(s)))).
Td3ActorLoss td3_actor_loss(const DenseNetd& actor, const DenseNetd& q1, const Eigen::MatrixXd& obs);

struct Td3Losses {
  double critic = 0.0;
  double actor = 0.0;
  bool actor_updated = false;
};

class Td3Agent final : public Agent {
 public:
  Td3Agent(AgentConfig cfg, int obs_dim, int act_dim);

  Eigen::VectorXd act(const Eigen::Ref<const Eigen::VectorXd>& obs, bool deterministic) override;
  void observe(const Transition& t) override;
  void clear_experience() override { buffer_.clear(); }

  Td3Losses update();
  Td3Losses update(const Batch& batch);

  const AgentConfig& config() const override { return cfg_; }
  const DenseNetd& actor() const override { return actor_; }
  long updates() const override { return updates_; }
  int observation_dim() const override { return obs_dim_; }
  int action_dim() const override { return act_dim_; }

  const DenseNetd& actor_target() const { return actor_target_; }
  const DenseNetd& q1() const { return q1_; }
  const DenseNetd& q2() const { return q2_; }
  const DenseNetd& q1_target() const { return q1_target_; }
  const DenseNetd& q2_target() const { return q2_target_; }
  const ReplayBuffer& buffer() const { return buffer_; }

 private:
  Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, double sd);

  AgentConfig cfg_;
  int obs_dim_;
  int act_dim_;
  std::mt19937_64 rng_;
  DenseNetd actor_, actor_target_, q1_, q2_, q1_target_, q2_target_;
  AdamState<double> actor_opt_, q1_opt_, q2_opt_;
  ReplayBuffer buffer_;
  long steps_ = 0;
  long updates_ = 0;
};

}  // namespace thermoarena::drl

#include "thermoarena/drl/td3.hpp"

namespace thermoarena::drl {

Eigen::VectorXd td3_targets(const DenseNetd& actor_target, const DenseNetd& q1_target, const DenseNetd& q2_target,
                            const Batch& batch, const Eigen::MatrixXd& noise, double noise_clip, double gamma) {
  Eigen::MatrixXd next = actor_target.forward(batch.next_obs).array().tanh().matrix();
  if (noise.rows() != next.rows() || noise.cols() != next.cols()) throw ShapeMismatch("target noise shape");
  next += noise.cwiseMax(-noise_clip).cwiseMin(noise_clip);
  next = next.cwiseMax(-1.0).cwiseMin(1.0);
  const auto in = critic_input(batch.next_obs, next);
  const Eigen::VectorXd q = q1_target.forward(in).row(0).cwiseMin(q2_target.forward(in).row(0)).transpose();
  return batch.rewards + gamma * (1.0 - batch.dones.array()).matrix().cwiseProduct(q);
}

Td3ActorLoss td3_actor_loss(const DenseNetd& actor, const DenseNetd& q1, const Eigen::MatrixXd& obs) {
  const double n = static_cast<double>(obs.cols());
  DenseNetd::Tape actor_tape, critic_tape;
  const Eigen::MatrixXd action = actor.forward(obs, &actor_tape).array().tanh().matrix();
  const Eigen::RowVectorXd q = q1.forward(critic_input(obs, action), &critic_tape).row(0);
  Td3ActorLoss out;
  out.loss = -q.mean();
  const Eigen::MatrixXd d_action =
      q1.input_gradient(critic_tape, Eigen::RowVectorXd::Constant(obs.cols(), -1.0 / n)).bottomRows(action.rows());
  const Eigen::MatrixXd d_head = d_action.cwiseProduct((1.0 - action.array().square()).matrix());
  out.grad = Eigen::VectorXd::Zero(actor.parameter_count());
  actor.backward(actor_tape, d_head, out.grad);
  return out;
}

Td3Agent::Td3Agent(AgentConfig cfg, int obs_dim, int act_dim)
    : cfg_(std::move(cfg)),
      obs_dim_(obs_dim),
      act_dim_(act_dim),
      rng_(cfg_.seed),
      buffer_(cfg_.buffer_size, obs_dim, act_dim) {
  cfg_.validate();
  actor_ = DenseNetd::random(mlp_sizes(obs_dim, cfg_.hidden, act_dim), rng_);
  q1_ = DenseNetd::random(mlp_sizes(obs_dim + act_dim, cfg_.hidden, 1), rng_);
  q2_ = DenseNetd::random(mlp_sizes(obs_dim + act_dim, cfg_.hidden, 1), rng_);
  actor_target_ = actor_;
  q1_target_ = q1_;
  q2_target_ = q2_;
  actor_opt_ = AdamState<double>(actor_.parameter_count());
  q1_opt_ = AdamState<double>(q1_.parameter_count());
  q2_opt_ = AdamState<double>(q2_.parameter_count());
}

Eigen::MatrixXd Td3Agent::gaussian(Eigen::Index rows, Eigen::Index cols, double sd) {
  std::normal_distribution<double> dist(0.0, sd);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng_);
  return m;
}

Eigen::VectorXd Td3Agent::act(const Eigen::Ref<const Eigen::VectorXd>& obs, bool deterministic) {
  if (obs.size() != obs_dim_) throw ShapeMismatch("observation size does not match the agent");
  Eigen::VectorXd a = actor_.forward_one(obs).array().tanh().matrix();
  if (deterministic) return a;
  if (steps_ < cfg_.learning_starts) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& x : a) x = u(rng_);
    return a;
  }
  a += gaussian(act_dim_, 1, cfg_.exploration_noise).col(0);
  return a.cwiseMax(-1.0).cwiseMin(1.0);
}

void Td3Agent::observe(const Transition& t) {
  buffer_.add(t);
  ++steps_;
  if (steps_ <= cfg_.learning_starts || steps_ % cfg_.train_freq != 0) return;
  if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) return;
  for (int g = 0; g < cfg_.gradient_steps; ++g) update();
}

Td3Losses Td3Agent::update() { return update(buffer_.sample(cfg_.batch_size, rng_)); }

Td3Losses Td3Agent::update(const Batch& batch) {
  ++updates_;
  Td3Losses out;
  const Eigen::MatrixXd noise = gaussian(act_dim_, batch.size(), cfg_.target_noise);
  const Eigen::VectorXd y =
      td3_targets(actor_target_, q1_target_, q2_target_, batch, noise, cfg_.target_noise_clip, cfg_.gamma);
  const auto critic = twin_critic_loss(q1_, q2_, batch.obs, batch.actions, y, 1.0);
  adam_step(q1_.parameters(), critic.grad_q1, q1_opt_, cfg_.learning_rate);
  adam_step(q2_.parameters(), critic.grad_q2, q2_opt_, cfg_.learning_rate);
  out.critic = critic.loss;

  if (updates_ % cfg_.policy_delay == 0) {
    const auto actor = td3_actor_loss(actor_, q1_, batch.obs);
    adam_step(actor_.parameters(), actor.grad, actor_opt_, cfg_.learning_rate);
    out.actor = actor.loss;
    out.actor_updated = true;
    polyak_update(q1_target_, q1_, cfg_.tau);
    polyak_update(q2_target_, q2_, cfg_.tau);
    polyak_update(actor_target_, actor_, cfg_.tau);
  }
  return out;
}

}  // namespace thermoarena::drl

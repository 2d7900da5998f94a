#include "thermoarena/drl/sac.hpp"

#include <cmath>

namespace thermoarena::drl {

Eigen::VectorXd sac_targets(const DenseNetd& actor, const DenseNetd& q1_target, const DenseNetd& q2_target,
                            const Batch& batch, const Eigen::MatrixXd& next_noise, double alpha, double gamma) {
  const auto next = SquashedGaussian::from_head(actor.forward(batch.next_obs), next_noise);
  const auto in = critic_input(batch.next_obs, next.action);
  const Eigen::RowVectorXd q = q1_target.forward(in).row(0).cwiseMin(q2_target.forward(in).row(0));
  const Eigen::VectorXd soft = (q - alpha * next.log_prob).transpose();
  return batch.rewards + gamma * (1.0 - batch.dones.array()).matrix().cwiseProduct(soft);
}

SacActorLoss sac_actor_loss(const DenseNetd& actor, const DenseNetd& q1, const DenseNetd& q2,
                            const Eigen::MatrixXd& obs, const Eigen::MatrixXd& noise, double alpha) {
  const double n = static_cast<double>(obs.cols());
  DenseNetd::Tape actor_tape, t1, t2;
  const auto pi = SquashedGaussian::from_head(actor.forward(obs, &actor_tape), noise);
  const auto in = critic_input(obs, pi.action);
  const Eigen::RowVectorXd v1 = q1.forward(in, &t1).row(0);
  const Eigen::RowVectorXd v2 = q2.forward(in, &t2).row(0);

  SacActorLoss out;
  Eigen::RowVectorXd g1 = Eigen::RowVectorXd::Zero(obs.cols());
  Eigen::RowVectorXd g2 = Eigen::RowVectorXd::Zero(obs.cols());
  for (Eigen::Index j = 0; j < obs.cols(); ++j) {
    const bool first = v1(j) <= v2(j);
    out.loss += (alpha * pi.log_prob(j) - (first ? v1(j) : v2(j))) / n;
    (first ? g1 : g2)(j) = -1.0 / n;
  }
  out.mean_log_prob = pi.log_prob.mean();

  const Eigen::Index a = noise.rows();
  const Eigen::MatrixXd d_action =
      q1.input_gradient(t1, g1).bottomRows(a) + q2.input_gradient(t2, g2).bottomRows(a);
  const Eigen::RowVectorXd d_log_prob = Eigen::RowVectorXd::Constant(obs.cols(), alpha / n);
  out.grad = Eigen::VectorXd::Zero(actor.parameter_count());
  actor.backward(actor_tape, pi.head_gradient(d_action, d_log_prob), out.grad);
  return out;
}

SacAgent::SacAgent(AgentConfig cfg, int obs_dim, int act_dim)
    : cfg_(std::move(cfg)),
      obs_dim_(obs_dim),
      act_dim_(act_dim),
      rng_(cfg_.seed),
      log_alpha_(Eigen::VectorXd::Constant(1, std::log(cfg_.init_ent_coef))),
      target_entropy_(-static_cast<double>(act_dim)),
      buffer_(cfg_.buffer_size, obs_dim, act_dim) {
  cfg_.validate();
  actor_ = DenseNetd::random(mlp_sizes(obs_dim, cfg_.hidden, 2 * act_dim), rng_);
  q1_ = DenseNetd::random(mlp_sizes(obs_dim + act_dim, cfg_.hidden, 1), rng_);
  q2_ = DenseNetd::random(mlp_sizes(obs_dim + act_dim, cfg_.hidden, 1), rng_);
  q1_target_ = q1_;
  q2_target_ = q2_;
  actor_opt_ = AdamState<double>(actor_.parameter_count());
  q1_opt_ = AdamState<double>(q1_.parameter_count());
  q2_opt_ = AdamState<double>(q2_.parameter_count());
  alpha_opt_ = AdamState<double>(1);
}

Eigen::MatrixXd SacAgent::standard_normal(Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng_);
  return m;
}

Eigen::VectorXd SacAgent::act(const Eigen::Ref<const Eigen::VectorXd>& obs, bool deterministic) {
  if (obs.size() != obs_dim_) throw ShapeMismatch("observation size does not match the agent");
  if (deterministic) return actor_.forward_one(obs).head(act_dim_).array().tanh().matrix();
  if (steps_ < cfg_.learning_starts) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd a(act_dim_);
    for (auto& x : a) x = u(rng_);
    return a;
  }
  const Eigen::MatrixXd head = actor_.forward(obs);
  return SquashedGaussian::from_head(head, standard_normal(act_dim_, 1)).action.col(0);
}

void SacAgent::observe(const Transition& t) {
  buffer_.add(t);
  ++steps_;
  if (steps_ <= cfg_.learning_starts || steps_ % cfg_.train_freq != 0) return;
  if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) return;
  for (int g = 0; g < cfg_.gradient_steps; ++g) update();
}

SacLosses SacAgent::update() { return update(buffer_.sample(cfg_.batch_size, rng_)); }

SacLosses SacAgent::update(const Batch& batch) {
  const Eigen::Index n = batch.size();
  const Eigen::MatrixXd noise = standard_normal(act_dim_, n);
  const Eigen::MatrixXd next_noise = standard_normal(act_dim_, n);
  SacLosses out;

  // Entropy coefficient, driven by the log-probability of fresh policy samples.
  if (cfg_.auto_entropy) {
    const auto pi = SquashedGaussian::from_head(actor_.forward(batch.obs), noise);
    const double gap = pi.log_prob.mean() + target_entropy_;
    out.alpha_loss = -log_alpha_(0) * gap;
    const Eigen::VectorXd grad = Eigen::VectorXd::Constant(1, -gap);
    adam_step(log_alpha_, grad, alpha_opt_, cfg_.learning_rate);
  }
  const double alpha = std::exp(log_alpha_(0));
  out.alpha = alpha;

  const Eigen::VectorXd y = sac_targets(actor_, q1_target_, q2_target_, batch, next_noise, alpha, cfg_.gamma);
  const auto critic = twin_critic_loss(q1_, q2_, batch.obs, batch.actions, y, 0.5);
  adam_step(q1_.parameters(), critic.grad_q1, q1_opt_, cfg_.learning_rate);
  adam_step(q2_.parameters(), critic.grad_q2, q2_opt_, cfg_.learning_rate);
  out.critic = critic.loss;

  const auto actor = sac_actor_loss(actor_, q1_, q2_, batch.obs, noise, alpha);
  adam_step(actor_.parameters(), actor.grad, actor_opt_, cfg_.learning_rate);
  out.actor = actor.loss;

  polyak_update(q1_target_, q1_, cfg_.tau);
  polyak_update(q2_target_, q2_, cfg_.tau);
  ++updates_;
  return out;
}

}  // namespace thermoarena::drl

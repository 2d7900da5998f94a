#include "thermoarena/drl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "thermoarena/drl/gae.hpp"

namespace thermoarena::drl {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

double gaussian_log_prob(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& mean,
                         const Eigen::Ref<const Eigen::VectorXd>& log_std) {
  const Eigen::ArrayXd z = (u - mean).array() / log_std.array().exp();
  return (-0.5 * z.square() - log_std.array() - kHalfLog2Pi).sum();
}

Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& adv) {
  if (adv.size() < 2) return adv;
  const double mean = adv.mean();
  const double sd = std::sqrt((adv.array() - mean).square().sum() / static_cast<double>(adv.size() - 1));
  return ((adv.array() - mean) / (sd + 1e-8)).matrix();
}

PpoLoss ppo_loss(const DenseNetd& actor, const Eigen::VectorXd& log_std, const DenseNetd& value_net,
                 const PpoMinibatch& mb, const AgentConfig& cfg) {
  const Eigen::Index n = mb.obs.cols();
  const Eigen::Index a = log_std.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double lo = 1.0 - cfg.clip_range, hi = 1.0 + cfg.clip_range;

  DenseNetd::Tape actor_tape, value_tape;
  const Eigen::MatrixXd mean = actor.forward(mb.obs, &actor_tape);
  const Eigen::RowVectorXd v = value_net.forward(mb.obs, &value_tape).row(0);
  const Eigen::VectorXd sd = log_std.array().exp();

  PpoLoss out;
  Eigen::MatrixXd d_mean(a, n);
  Eigen::VectorXd d_log_std = Eigen::VectorXd::Zero(a);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::ArrayXd z = (mb.pre_tanh.col(j) - mean.col(j)).array() / sd.array();
    const double log_prob = (-0.5 * z.square() - log_std.array() - kHalfLog2Pi).sum();
    const double ratio = std::exp(log_prob - mb.old_log_probs(j));
    const double adv = mb.advantages(j);
    const double clipped = std::clamp(ratio, lo, hi);
    out.policy -= std::min(ratio * adv, clipped * adv) * inv_n;
    if (ratio < lo || ratio > hi) out.clip_fraction += inv_n;
    // gradient flows through the unclipped branch whenever min() selects it
    const bool active = ratio * adv <= clipped * adv || (ratio > lo && ratio < hi);
    const double d_log_prob = active ? -adv * ratio * inv_n : 0.0;
    d_mean.col(j) = d_log_prob * (z / sd.array()).matrix();
    d_log_std += d_log_prob * (z.square() - 1.0).matrix();
  }

  out.entropy = (log_std.array() + 0.5 + kHalfLog2Pi).sum();
  d_log_std.array() -= cfg.ent_coef;

  const Eigen::RowVectorXd err = v - mb.returns.transpose();
  out.value = err.squaredNorm() * inv_n;
  out.total = out.policy - cfg.ent_coef * out.entropy + cfg.vf_coef * out.value;

  out.grad_actor = Eigen::VectorXd::Zero(actor.parameter_count());
  actor.backward(actor_tape, d_mean, out.grad_actor);
  out.grad_log_std = d_log_std;
  out.grad_value = Eigen::VectorXd::Zero(value_net.parameter_count());
  value_net.backward(value_tape, (2.0 * cfg.vf_coef * inv_n) * err, out.grad_value);
  return out;
}

PpoAgent::PpoAgent(AgentConfig cfg, int obs_dim, int act_dim)
    : cfg_(std::move(cfg)), obs_dim_(obs_dim), act_dim_(act_dim), rng_(cfg_.seed) {
  cfg_.validate();
  actor_ = DenseNetd::random(mlp_sizes(obs_dim, cfg_.hidden, act_dim), rng_);
  value_ = DenseNetd::random(mlp_sizes(obs_dim, cfg_.hidden, 1), rng_);
  log_std_ = Eigen::VectorXd::Zero(act_dim);
  opt_ = AdamState<double>(actor_.parameter_count() + act_dim + value_.parameter_count());
  const Eigen::Index n = cfg_.n_steps;
  rollout_ = {Eigen::MatrixXd(obs_dim, n), Eigen::MatrixXd(act_dim, n), Eigen::VectorXd(n), Eigen::VectorXd(n),
              Eigen::VectorXd(n), Eigen::VectorXd(n), 0.0};
}

Eigen::VectorXd PpoAgent::act(const Eigen::Ref<const Eigen::VectorXd>& obs, bool deterministic) {
  if (obs.size() != obs_dim_) throw ShapeMismatch("observation size does not match the agent");
  const Eigen::VectorXd mean = actor_.forward_one(obs);
  if (deterministic) return mean.array().tanh().matrix();
  std::normal_distribution<double> n01;
  Eigen::VectorXd u(act_dim_);
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = mean(i) + std::exp(log_std_(i)) * n01(rng_);
  pending_u_ = u;
  pending_log_prob_ = gaussian_log_prob(u, mean, log_std_);
  pending_value_ = value_.forward_one(obs)(0);
  return u.array().tanh().matrix();
}

void PpoAgent::observe(const Transition& t) {
  if (pending_u_.size() != act_dim_) throw ShapeMismatch("observe() without a preceding stochastic act()");
  double reward = t.reward;
  if (t.truncated && !t.done) reward += cfg_.gamma * value_.forward_one(t.next_obs)(0);
  rollout_.obs.col(filled_) = t.obs;
  rollout_.pre_tanh.col(filled_) = pending_u_;
  rollout_.log_probs(filled_) = pending_log_prob_;
  rollout_.values(filled_) = pending_value_;
  rollout_.rewards(filled_) = reward;
  rollout_.dones(filled_) = (t.done || t.truncated) ? 1.0 : 0.0;
  pending_u_.resize(0);
  if (++filled_ < cfg_.n_steps) return;
  rollout_.last_value = value_.forward_one(t.next_obs)(0);
  update(rollout_);
  filled_ = 0;
}

PpoLosses PpoAgent::update(const Rollout& r) {
  const Eigen::Index n = r.size();
  if (n != cfg_.n_steps)
    throw RolloutTooShort("rollout holds " + std::to_string(n) + " steps, expected " + std::to_string(cfg_.n_steps));
  auto [adv, returns] = gae<double>(r.rewards, r.values, r.dones, r.last_value, cfg_.gamma, cfg_.gae_lambda);
  adv = normalize_advantages(adv);

  const Eigen::Index pa = actor_.parameter_count();
  const Eigen::Index pv = value_.parameter_count();
  Eigen::VectorXd params(pa + act_dim_ + pv);
  Eigen::VectorXd grad(params.size());
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);

  PpoLosses out;
  int batches = 0;
  for (int epoch = 0; epoch < cfg_.n_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng_);
    for (Eigen::Index start = 0; start < n; start += cfg_.batch_size) {
      const Eigen::Index m = std::min<Eigen::Index>(cfg_.batch_size, n - start);
      PpoMinibatch mb{Eigen::MatrixXd(obs_dim_, m), Eigen::MatrixXd(act_dim_, m), Eigen::VectorXd(m),
                      Eigen::VectorXd(m), Eigen::VectorXd(m)};
      for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::Index s = order[start + k];
        mb.obs.col(k) = r.obs.col(s);
        mb.pre_tanh.col(k) = r.pre_tanh.col(s);
        mb.old_log_probs(k) = r.log_probs(s);
        mb.advantages(k) = adv(s);
        mb.returns(k) = returns(s);
      }
      const auto loss = ppo_loss(actor_, log_std_, value_, mb, cfg_);
      grad << loss.grad_actor, loss.grad_log_std, loss.grad_value;
      clip_grad_norm(grad, cfg_.max_grad_norm);
      params << actor_.parameters(), log_std_, value_.parameters();
      adam_step(params, grad, opt_, cfg_.learning_rate);
      actor_.parameters() = params.head(pa);
      log_std_ = params.segment(pa, act_dim_);
      value_.parameters() = params.tail(pv);

      out.policy += loss.policy;
      out.value += loss.value;
      out.entropy += loss.entropy;
      out.clip_fraction += loss.clip_fraction;
      ++batches;
    }
  }
  out.policy /= batches;
  out.value /= batches;
  out.entropy /= batches;
  out.clip_fraction /= batches;
  ++updates_;
  return out;
}

}  // namespace thermoarena::drl

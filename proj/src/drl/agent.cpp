#include "thermoarena/drl/agent.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "thermoarena/drl/losses.hpp"
#include "thermoarena/drl/ppo.hpp"
#include "thermoarena/drl/sac.hpp"
#include "thermoarena/drl/td3.hpp"

namespace thermoarena::drl {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "sac") return Algorithm::sac;
  if (name == "td3") return Algorithm::td3;
  if (name == "ppo") return Algorithm::ppo;
  throw ConfigError("agent.algorithm", "unknown algorithm '" + name + "' (expected sac, td3 or ppo)");
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::sac: return "sac";
    case Algorithm::td3: return "td3";
    case Algorithm::ppo: return "ppo";
  }
  return "?";
}

AgentConfig AgentConfig::defaults(Algorithm algorithm) {
  AgentConfig c;
  c.algorithm = algorithm;
  switch (algorithm) {
    case Algorithm::sac:
      c.learning_rate = 3e-4;
      c.buffer_size = 1'000'000;
      c.batch_size = 256;
      c.tau = 0.005;
      c.gamma = 0.99;
      c.hidden = {256, 256};
      break;
    case Algorithm::td3:
      c.learning_rate = 3e-3;
      c.buffer_size = 1'000'000;
      c.batch_size = 64;
      c.tau = 0.005;
      c.gamma = 0.9;
      c.hidden = {400, 300};
      break;
    case Algorithm::ppo:
      c.learning_rate = 1e-3;
      c.n_steps = 4096;
      c.batch_size = 128;
      c.n_epochs = 15;
      c.gamma = 0.9;
      c.gae_lambda = 0.9;
      c.hidden = {64, 64};
      break;
  }
  return c;
}

void AgentConfig::validate() const {
  auto fail = [](const char* key, const char* what) { throw ConfigError(std::string("agent.") + key, what); };
  if (!(learning_rate > 0.0)) fail("learning_rate", "must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma", "must lie in (0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) fail("tau", "must lie in (0, 1]");
  if (!(gae_lambda > 0.0 && gae_lambda <= 1.0)) fail("gae_lambda", "must lie in (0, 1]");
  if (batch_size <= 0) fail("batch_size", "must be positive");
  if (buffer_size == 0) fail("buffer_size", "must be positive");
  if (hidden.empty()) fail("hidden", "needs at least one hidden layer");
  for (int h : hidden)
    if (h <= 0) fail("hidden", "layer widths must be positive");
  if (train_freq <= 0) fail("train_freq", "must be positive");
  if (gradient_steps <= 0) fail("gradient_steps", "must be positive");
  if (learning_starts < 0) fail("learning_starts", "must be >= 0");
  if (policy_delay <= 0) fail("policy_delay", "must be positive");
  if (n_steps <= 0) fail("n_steps", "must be positive");
  if (n_epochs <= 0) fail("n_epochs", "must be positive");
  if (algorithm == Algorithm::ppo && batch_size > n_steps) fail("batch_size", "must not exceed n_steps");
  if (!(clip_range > 0.0)) fail("clip_range", "must be > 0");
  if (!(init_ent_coef > 0.0)) fail("init_ent_coef", "must be > 0");
}

namespace {

std::vector<int> parse_int_list(const std::string& s, const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError(key, "expected a comma-separated list of integers");
    }
  }
  return out;
}

}  // namespace

AgentConfig AgentConfig::from_tree(const config::Tree& t) {
  config::reject_unknown(t, "agent",
                         {"algorithm", "learning_rate", "buffer_size", "batch_size", "gamma", "tau", "hidden",
                          "learning_starts", "train_freq", "gradient_steps", "init_ent_coef", "auto_entropy",
                          "policy_delay", "target_noise", "target_noise_clip", "exploration_noise", "n_steps",
                          "n_epochs", "gae_lambda", "clip_range", "ent_coef", "vf_coef", "max_grad_norm", "seed"});
  auto c = defaults(parse_algorithm(config::get_or<std::string>(t, "agent.algorithm", "sac")));
  c.learning_rate = config::get_or(t, "agent.learning_rate", c.learning_rate);
  c.buffer_size = config::get_or(t, "agent.buffer_size", c.buffer_size);
  c.batch_size = config::get_or(t, "agent.batch_size", c.batch_size);
  c.gamma = config::get_or(t, "agent.gamma", c.gamma);
  c.tau = config::get_or(t, "agent.tau", c.tau);
  if (auto h = t.get_optional<std::string>("agent.hidden"); h && !h->empty()) c.hidden = parse_int_list(*h, "agent.hidden");
  c.learning_starts = config::get_or(t, "agent.learning_starts", c.learning_starts);
  c.train_freq = config::get_or(t, "agent.train_freq", c.train_freq);
  c.gradient_steps = config::get_or(t, "agent.gradient_steps", c.gradient_steps);
  c.init_ent_coef = config::get_or(t, "agent.init_ent_coef", c.init_ent_coef);
  c.auto_entropy = config::get_or(t, "agent.auto_entropy", c.auto_entropy);
  c.policy_delay = config::get_or(t, "agent.policy_delay", c.policy_delay);
  c.target_noise = config::get_or(t, "agent.target_noise", c.target_noise);
  c.target_noise_clip = config::get_or(t, "agent.target_noise_clip", c.target_noise_clip);
  c.exploration_noise = config::get_or(t, "agent.exploration_noise", c.exploration_noise);
  c.n_steps = config::get_or(t, "agent.n_steps", c.n_steps);
  c.n_epochs = config::get_or(t, "agent.n_epochs", c.n_epochs);
  c.gae_lambda = config::get_or(t, "agent.gae_lambda", c.gae_lambda);
  c.clip_range = config::get_or(t, "agent.clip_range", c.clip_range);
  c.ent_coef = config::get_or(t, "agent.ent_coef", c.ent_coef);
  c.vf_coef = config::get_or(t, "agent.vf_coef", c.vf_coef);
  c.max_grad_norm = config::get_or(t, "agent.max_grad_norm", c.max_grad_norm);
  c.seed = config::get_or<std::uint64_t>(t, "agent.seed", c.seed);
  c.validate();
  return c;
}

void AgentConfig::to_tree(config::Tree& t) const {
  std::string hidden_list;
  for (std::size_t i = 0; i < hidden.size(); ++i) hidden_list += (i ? "," : "") + std::to_string(hidden[i]);
  t.put("agent.algorithm", to_string(algorithm));
  config::put_number(t, "agent.learning_rate", learning_rate);
  t.put("agent.buffer_size", buffer_size);
  t.put("agent.batch_size", batch_size);
  config::put_number(t, "agent.gamma", gamma);
  config::put_number(t, "agent.tau", tau);
  t.put("agent.hidden", hidden_list);
  t.put("agent.learning_starts", learning_starts);
  t.put("agent.train_freq", train_freq);
  t.put("agent.gradient_steps", gradient_steps);
  config::put_number(t, "agent.init_ent_coef", init_ent_coef);
  t.put("agent.auto_entropy", auto_entropy ? "true" : "false");
  t.put("agent.policy_delay", policy_delay);
  config::put_number(t, "agent.target_noise", target_noise);
  config::put_number(t, "agent.target_noise_clip", target_noise_clip);
  config::put_number(t, "agent.exploration_noise", exploration_noise);
  t.put("agent.n_steps", n_steps);
  t.put("agent.n_epochs", n_epochs);
  config::put_number(t, "agent.gae_lambda", gae_lambda);
  config::put_number(t, "agent.clip_range", clip_range);
  config::put_number(t, "agent.ent_coef", ent_coef);
  config::put_number(t, "agent.vf_coef", vf_coef);
  config::put_number(t, "agent.max_grad_norm", max_grad_norm);
  t.put("agent.seed", seed);
}

// --- replay buffer ---------------------------------------------------------

ReplayBuffer::ReplayBuffer(std::size_t capacity, int obs_dim, int act_dim)
    : capacity_(capacity), obs_dim_(obs_dim), act_dim_(act_dim) {
  if (capacity == 0) throw ConfigError("agent.buffer_size", "must be positive");
}

void ReplayBuffer::clear() {
  size_ = next_ = 0;
  obs_.clear();
  actions_.clear();
  rewards_.clear();
  next_obs_.clear();
  dones_.clear();
}

void ReplayBuffer::add(const Transition& t) {
  if (t.obs.size() != obs_dim_ || t.next_obs.size() != obs_dim_ || t.action.size() != act_dim_)
    throw ShapeMismatch("transition does not match replay buffer dimensions");
  const double done = t.done ? 1.0 : 0.0;
  if (size_ < capacity_) {
    obs_.insert(obs_.end(), t.obs.data(), t.obs.data() + obs_dim_);
    actions_.insert(actions_.end(), t.action.data(), t.action.data() + act_dim_);
    next_obs_.insert(next_obs_.end(), t.next_obs.data(), t.next_obs.data() + obs_dim_);
    rewards_.push_back(t.reward);
    dones_.push_back(done);
    ++size_;
  } else {
    std::copy_n(t.obs.data(), obs_dim_, obs_.begin() + next_ * obs_dim_);
    std::copy_n(t.action.data(), act_dim_, actions_.begin() + next_ * act_dim_);
    std::copy_n(t.next_obs.data(), obs_dim_, next_obs_.begin() + next_ * obs_dim_);
    rewards_[next_] = t.reward;
    dones_[next_] = done;
  }
  next_ = (next_ + 1) % capacity_;
}

Batch ReplayBuffer::gather(const std::vector<std::size_t>& slots) const {
  const auto n = static_cast<Eigen::Index>(slots.size());
  Batch b{Eigen::MatrixXd(obs_dim_, n), Eigen::MatrixXd(act_dim_, n), Eigen::VectorXd(n), Eigen::MatrixXd(obs_dim_, n),
          Eigen::VectorXd(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::size_t s = slots[j];
    if (s >= size_) throw ShapeMismatch("replay slot out of range");
    b.obs.col(j) = Eigen::Map<const Eigen::VectorXd>(obs_.data() + s * obs_dim_, obs_dim_);
    b.actions.col(j) = Eigen::Map<const Eigen::VectorXd>(actions_.data() + s * act_dim_, act_dim_);
    b.next_obs.col(j) = Eigen::Map<const Eigen::VectorXd>(next_obs_.data() + s * obs_dim_, obs_dim_);
    b.rewards(j) = rewards_[s];
    b.dones(j) = dones_[s];
  }
  return b;
}

Batch ReplayBuffer::sample(int batch_size, std::mt19937_64& rng) const {
  if (batch_size <= 0 || static_cast<std::size_t>(batch_size) > size_)
    throw NotEnoughSamples("replay buffer holds " + std::to_string(size_) + " transitions, batch needs " +
                           std::to_string(batch_size));
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<std::size_t> slots(batch_size);
  for (auto& s : slots) s = pick(rng);
  return gather(slots);
}

Transition ReplayBuffer::at(std::size_t slot) const {
  const auto b = gather({slot});
  return {b.obs.col(0), b.actions.col(0), b.rewards(0), b.next_obs.col(0), b.dones(0) > 0.5, false};
}

// --- shared loss pieces ----------------------------------------------------

Eigen::MatrixXd critic_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) {
  if (obs.cols() != actions.cols()) throw ShapeMismatch("observation and action batches differ in size");
  Eigen::MatrixXd in(obs.rows() + actions.rows(), obs.cols());
  in.topRows(obs.rows()) = obs;
  in.bottomRows(actions.rows()) = actions;
  return in;
}

TwinCriticLoss twin_critic_loss(const DenseNetd& q1, const DenseNetd& q2, const Eigen::MatrixXd& obs,
                                const Eigen::MatrixXd& actions, const Eigen::VectorXd& targets, double scale) {
  const auto in = critic_input(obs, actions);
  const double n = static_cast<double>(in.cols());
  TwinCriticLoss out;
  out.grad_q1 = Eigen::VectorXd::Zero(q1.parameter_count());
  out.grad_q2 = Eigen::VectorXd::Zero(q2.parameter_count());
  auto one = [&](const DenseNetd& q, Eigen::VectorXd& grad) {
    DenseNetd::Tape tape;
    const Eigen::RowVectorXd diff = q.forward(in, &tape).row(0) - targets.transpose();
    out.loss += scale * diff.squaredNorm() / n;
    q.backward(tape, (2.0 * scale / n) * diff, grad);
  };
  one(q1, out.grad_q1);
  one(q2, out.grad_q2);
  return out;
}

double log1m_tanh2(double u) {
  // log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u))
  const double x = -2.0 * u;
  const double softplus = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  return 2.0 * (std::numbers::ln2 - u - softplus);
}

SquashedGaussian SquashedGaussian::from_head(const Eigen::MatrixXd& head, const Eigen::MatrixXd& noise) {
  const Eigen::Index a = noise.rows();
  if (head.rows() != 2 * a || head.cols() != noise.cols())
    throw ShapeMismatch("policy head must stack mean and log-std rows for every noise column");
  SquashedGaussian g;
  g.mean = head.topRows(a);
  const Eigen::MatrixXd raw = head.bottomRows(a);
  g.log_std = raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  g.log_std_active = ((raw.array() > kLogStdMin) && (raw.array() < kLogStdMax)).cast<double>().matrix();
  g.std = g.log_std.array().exp().matrix();
  g.noise = noise;
  g.pre_tanh = g.mean + g.std.cwiseProduct(noise);
  g.action = g.pre_tanh.array().tanh().matrix();
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  g.log_prob = Eigen::RowVectorXd::Zero(noise.cols());
  for (Eigen::Index j = 0; j < noise.cols(); ++j)
    for (Eigen::Index i = 0; i < a; ++i)
      g.log_prob(j) += -0.5 * noise(i, j) * noise(i, j) - g.log_std(i, j) - half_log_2pi - log1m_tanh2(g.pre_tanh(i, j));
  return g;
}

Eigen::MatrixXd SquashedGaussian::head_gradient(const Eigen::MatrixXd& d_action,
                                                const Eigen::RowVectorXd& d_log_prob) const {
  const Eigen::Index a = mean.rows();
  // d log_prob / d pre_tanh = 2 tanh(u); d action / d pre_tanh = 1 - tanh(u)^2
  Eigen::MatrixXd d_pre = d_action.cwiseProduct((1.0 - action.array().square()).matrix());
  Eigen::MatrixXd tanh_term = 2.0 * action;
  tanh_term.array().rowwise() *= d_log_prob.array();
  d_pre += tanh_term;
  Eigen::MatrixXd grad(2 * a, mean.cols());
  grad.topRows(a) = d_pre;
  Eigen::MatrixXd d_log_std = d_pre.cwiseProduct(std).cwiseProduct(noise);
  d_log_std.array().rowwise() -= d_log_prob.array();
  grad.bottomRows(a) = d_log_std.cwiseProduct(log_std_active);
  return grad;
}

// --- policies ----------------------------------------------------------------

Eigen::VectorXd TrainedPolicy::act(const Eigen::Ref<const Eigen::VectorXd>& obs) const {
  if (obs.size() != actor.input_size())
    throw ShapeMismatch("policy expects " + std::to_string(actor.input_size()) + " observation slots, got " +
                        std::to_string(obs.size()));
  return actor.forward_one(obs).head(action_dim).array().tanh().matrix();
}

TrainedPolicy Agent::snapshot(const std::string& building, const env::MinMaxNormalizer& normalizer) const {
  return {config(), building, action_dim(), actor(), normalizer};
}

env::Action act(const TrainedPolicy& policy, const Eigen::Ref<const Eigen::VectorXd>& obs) {
  return env::action_from_unit(policy.act(obs));
}

std::vector<int> mlp_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg, int obs_dim, int act_dim) {
  cfg.validate();
  switch (cfg.algorithm) {
    case Algorithm::sac: return std::make_unique<SacAgent>(cfg, obs_dim, act_dim);
    case Algorithm::td3: return std::make_unique<Td3Agent>(cfg, obs_dim, act_dim);
    case Algorithm::ppo: return std::make_unique<PpoAgent>(cfg, obs_dim, act_dim);
  }
  throw ConfigError("agent.algorithm", "unsupported");
}

}  // namespace thermoarena::drl

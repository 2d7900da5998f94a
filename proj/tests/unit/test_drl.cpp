#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <numbers>

#include "support.hpp"
#include "thermoarena/drl/checkpoint.hpp"
#include "thermoarena/drl/gae.hpp"
#include "thermoarena/drl/ppo.hpp"
#include "thermoarena/drl/sac.hpp"
#include "thermoarena/drl/td3.hpp"

using namespace thermoarena;
using namespace thermoarena::drl;

namespace {

// Reference evaluator written against the documented layout, one scalar at a time.
Eigen::VectorXd naive_forward(const DenseNetd& net, const Eigen::VectorXd& x) {
  std::vector<double> a(x.data(), x.data() + x.size());
  const auto& sizes = net.sizes();
  const double* p = net.parameters().data();
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l], out = sizes[l + 1];
    std::vector<double> z(out, 0.0);
    for (int o = 0; o < out; ++o) {
      for (int i = 0; i < in; ++i) z[o] += p[i * out + o] * a[i];
      z[o] += p[in * out + o];
      if (l + 2 < sizes.size()) z[o] = std::tanh(z[o]);
    }
    p += (in + 1) * out;
    a = z;
  }
  return Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
}

DenseNetd with_params(DenseNetd net, const Eigen::VectorXd& p) {
  net.parameters() = p;
  return net;
}

Batch random_batch(int n, int obs_dim, int act_dim, std::mt19937_64& rng) {
  Batch b;
  b.obs = test::random_matrix(obs_dim, n, rng);
  b.actions = test::random_matrix(act_dim, n, rng, 0.5).array().tanh().matrix();
  b.rewards = test::random_matrix(n, 1, rng);
  b.next_obs = test::random_matrix(obs_dim, n, rng);
  b.dones = Eigen::VectorXd::Zero(n);
  b.dones(0) = 1.0;
  return b;
}

AgentConfig bandit_config(Algorithm algo) {
  auto c = AgentConfig::defaults(algo);
  c.hidden = {32, 32};
  c.gamma = 0.9;
  c.seed = 7;
  if (algo == Algorithm::ppo) {
    c.n_steps = 256;
    c.batch_size = 64;
    c.n_epochs = 10;
    c.learning_rate = 3e-3;
  } else {
    c.batch_size = 64;
    c.buffer_size = 10'000;
    c.learning_starts = 100;
    c.learning_rate = 1e-3;
  }
  return c;
}

// Single state, reward -(a - 0.3)^2, every step terminal.
double run_bandit(Agent& agent, int steps) {
  const Eigen::VectorXd obs = Eigen::VectorXd::Ones(1);
  for (int t = 0; t < steps; ++t) {
    const Eigen::VectorXd a = agent.act(obs, false);
    const double r = -(a(0) - 0.3) * (a(0) - 0.3);
    agent.observe({obs, a, r, obs, true, false});
  }
  return agent.act(obs, true)(0);
}

}  // namespace

TEST_CASE("dense net forward") {
  std::mt19937_64 rng(1);
  SUBCASE("zero weights give the bias") {
    DenseNetd net({3, 4, 2});
    net.bias(1) << 0.5, -1.5;
    const Eigen::VectorXd out = net.forward_one(Eigen::Vector3d(1, 2, 3));
    CHECK(out(0) == 0.5);
    CHECK(out(1) == -1.5);
  }
  SUBCASE("single linear weight") {
    DenseNetd net({1, 1});
    net.weight(0)(0, 0) = 2.5;
    CHECK(net.forward_one(Eigen::VectorXd::Constant(1, 3.0))(0) == 7.5);
  }
  SUBCASE("matches the naive evaluator") {
    const auto net = DenseNetd::random({5, 7, 6, 3}, rng);
    for (int k = 0; k < 10; ++k) {
      const Eigen::VectorXd x = test::random_matrix(5, 1, rng);
      CHECK((net.forward_one(x) - naive_forward(net, x)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("parameter count") {
    DenseNetd net({20, 256, 256, 4});
    CHECK(net.parameter_count() == 21 * 256 + 257 * 256 + 257 * 4);
  }
  SUBCASE("wrong input size") {
    DenseNetd net({3, 2});
    CHECK_THROWS_AS(net.forward(Eigen::MatrixXd::Zero(4, 1)), ShapeMismatch);
  }
}

TEST_CASE("dense net backward") {
  std::mt19937_64 rng(2);
  const auto net = DenseNetd::random({4, 6, 5, 3}, rng);
  const Eigen::MatrixXd x = test::random_matrix(4, 8, rng);
  const Eigen::MatrixXd g = test::random_matrix(3, 8, rng);

  DenseNetd::Tape tape;
  net.forward(x, &tape);
  Eigen::VectorXd grad;
  const Eigen::MatrixXd dx = net.backward(tape, g, grad);

  SUBCASE("parameter gradient matches finite differences") {
    auto loss = [&](const Eigen::VectorXd& p) { return with_params(net, p).forward(x).cwiseProduct(g).sum(); };
    CHECK(test::max_fd_error(net.parameters(), grad, loss) < 1e-4);
  }
  SUBCASE("input gradient matches finite differences") {
    Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    Eigen::VectorXd analytic = Eigen::Map<const Eigen::VectorXd>(dx.data(), dx.size());
    auto loss = [&](const Eigen::VectorXd& v) {
      return net.forward(Eigen::Map<const Eigen::MatrixXd>(v.data(), 4, 8)).cwiseProduct(g).sum();
    };
    CHECK(test::max_fd_error(flat, analytic, loss) < 1e-4);
    CHECK((net.input_gradient(tape, g) - dx).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("zero output gradient") {
    Eigen::VectorXd zero;
    net.backward(tape, Eigen::MatrixXd::Zero(3, 8), zero);
    CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("linear in the output gradient") {
    Eigen::VectorXd twice;
    net.backward(tape, 2.0 * g, twice);
    CHECK((twice - 2.0 * grad).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("tape from another batch size") {
    Eigen::VectorXd gr;
    CHECK_THROWS_AS(net.backward(tape, Eigen::MatrixXd::Zero(3, 2), gr), ShapeMismatch);
  }
}

TEST_CASE("adam") {
  SUBCASE("zero gradient leaves parameters") {
    Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(4, -1, 1);
    const Eigen::VectorXd before = p;
    AdamState<double> s(4);
    adam_step(p, Eigen::VectorXd::Zero(4), s, 1e-3);
    CHECK(p == before);
  }
  SUBCASE("first step moves by lr against the gradient sign") {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
    AdamState<double> s(3);
    adam_step(p, Eigen::Vector3d(2.0, -0.01, 50.0), s, 1e-3);
    // m_hat = g, v_hat = g^2  =>  step = lr * g / (|g| + eps)
    CHECK(p(0) == doctest::Approx(-1e-3 * 2.0 / (2.0 + 1e-8)).epsilon(1e-12));
    CHECK(p(1) == doctest::Approx(1e-3 * 0.01 / (0.01 + 1e-8)).epsilon(1e-12));
    CHECK(p(2) == doctest::Approx(-1e-3).epsilon(1e-9));
  }
  SUBCASE("constant gradient step tends to lr") {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(1);
    AdamState<double> s(1);
    double last = 0.0;
    for (int t = 0; t < 20000; ++t) {
      const double before = p(0);
      adam_step(p, Eigen::VectorXd::Constant(1, 0.3), s, 1e-3);
      last = before - p(0);
    }
    CHECK(last == doctest::Approx(1e-3).epsilon(1e-6));
  }
  SUBCASE("size mismatch") {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(2);
    AdamState<double> s(3);
    CHECK_THROWS_AS(adam_step(p, Eigen::VectorXd::Zero(2), s, 1e-3), ShapeMismatch);
  }
}

TEST_CASE("gae") {
  const Eigen::Vector3d r(1, 1, 1), v = Eigen::Vector3d::Zero(), d(0, 0, 1);
  SUBCASE("undiscounted returns") {
    const auto [adv, ret] = gae<double>(r, v, d, 0.0, 1.0, 1.0);
    CHECK(adv(0) == 3.0);
    CHECK(adv(1) == 2.0);
    CHECK(adv(2) == 1.0);
    CHECK(ret == adv);
  }
  SUBCASE("gamma = lambda = 0.9") {
    const auto [adv, ret] = gae<double>(r, v, d, 0.0, 0.9, 0.9);
    CHECK(adv(0) == doctest::Approx(2.4661).epsilon(1e-12));
    CHECK(adv(1) == doctest::Approx(1.81).epsilon(1e-12));
    CHECK(adv(2) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("lambda = 0 is the one-step TD error") {
    const Eigen::Vector3d vals(0.5, -0.2, 0.3);
    const Eigen::Vector3d live(0, 0, 0);
    const auto [adv, ret] = gae<double>(r, vals, live, 0.7, 0.9, 0.0);
    CHECK(adv(0) == doctest::Approx(1 + 0.9 * -0.2 - 0.5));
    CHECK(adv(1) == doctest::Approx(1 + 0.9 * 0.3 + 0.2));
    CHECK(adv(2) == doctest::Approx(1 + 0.9 * 0.7 - 0.3));
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(gae<double>(r, Eigen::Vector2d::Zero(), d, 0.0, 0.9, 0.9), LengthMismatch);
  }
}

TEST_CASE("polyak averaging closed form") {
  std::mt19937_64 rng(3);
  auto target = DenseNetd::random({3, 4, 2}, rng);
  const auto online = DenseNetd::random({3, 4, 2}, rng);
  const Eigen::VectorXd initial = target.parameters();
  const double tau = 0.005;
  const int k = 200;
  for (int i = 0; i < k; ++i) polyak_update(target, online, tau);
  const double keep = std::pow(1.0 - tau, k);
  const Eigen::VectorXd expected = keep * initial + (1.0 - keep) * online.parameters();
  CHECK((target.parameters() - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("replay buffer") {
  auto item = [](double x) {
    return Transition{Eigen::VectorXd::Constant(2, x), Eigen::VectorXd::Constant(1, -x), x, Eigen::VectorXd::Constant(2, x + 1),
                      false, false};
  };
  SUBCASE("oldest items are evicted") {
    ReplayBuffer buf(10, 2, 1);
    for (int i = 0; i < 13; ++i) buf.add(item(i));
    CHECK(buf.size() == 10);
    std::set<double> present;
    for (std::size_t s = 0; s < buf.size(); ++s) present.insert(buf.at(s).reward);
    for (int i = 0; i < 3; ++i) CHECK(present.count(i) == 0);
    for (int i = 3; i < 13; ++i) CHECK(present.count(i) == 1);
  }
  SUBCASE("uniform sampling") {
    const int n = 20;
    ReplayBuffer buf(n, 2, 1);
    for (int i = 0; i < n; ++i) buf.add(item(i));
    std::mt19937_64 rng(11);
    std::map<int, int> counts;
    const int draws = 100'000;
    for (int k = 0; k < draws / n; ++k) {
      const auto b = buf.sample(n, rng);
      for (Eigen::Index j = 0; j < b.size(); ++j) ++counts[static_cast<int>(b.rewards(j))];
    }
    const double p = 1.0 / n, expected = draws * p, sigma = std::sqrt(draws * p * (1 - p));
    for (int i = 0; i < n; ++i) CHECK(std::abs(counts[i] - expected) < 3.0 * sigma);
  }
  SUBCASE("seeded sampling is reproducible") {
    ReplayBuffer buf(50, 2, 1);
    for (int i = 0; i < 50; ++i) buf.add(item(i));
    std::mt19937_64 a(5), b(5);
    CHECK(buf.sample(16, a).rewards == buf.sample(16, b).rewards);
  }
  SUBCASE("not enough samples") {
    ReplayBuffer buf(50, 2, 1);
    buf.add(item(1));
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(buf.sample(2, rng), NotEnoughSamples);
  }
  SUBCASE("wrong observation size") {
    ReplayBuffer buf(5, 3, 1);
    CHECK_THROWS_AS(buf.add(item(0)), ShapeMismatch);
  }
}

TEST_CASE("squashed gaussian") {
  std::mt19937_64 rng(4);
  const int a = 3, n = 5;
  const Eigen::MatrixXd head = test::random_matrix(2 * a, n, rng);
  const Eigen::MatrixXd noise = test::random_matrix(a, n, rng);
  const auto g = SquashedGaussian::from_head(head, noise);

  SUBCASE("log-probability matches the change of variables") {
    for (int j = 0; j < n; ++j) {
      double expected = 0.0;
      for (int i = 0; i < a; ++i) {
        const double sd = std::exp(head(a + i, j));
        const double u = head(i, j) + sd * noise(i, j);
        const double z = (u - head(i, j)) / sd;
        expected += -0.5 * z * z - std::log(sd) - 0.5 * std::log(2 * std::numbers::pi) -
                    std::log(1.0 - std::tanh(u) * std::tanh(u));
      }
      CHECK(g.log_prob(j) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
  SUBCASE("log1m_tanh2 is stable for large inputs") {
    CHECK(log1m_tanh2(0.0) == doctest::Approx(0.0));
    CHECK(log1m_tanh2(30.0) == doctest::Approx(2 * (std::log(2.0) - 30.0)).epsilon(1e-12));
    CHECK(std::isfinite(log1m_tanh2(-400.0)));
  }
  SUBCASE("head gradient matches finite differences") {
    const Eigen::MatrixXd wa = test::random_matrix(a, n, rng);
    const Eigen::RowVectorXd wl = test::random_matrix(1, n, rng);
    auto loss = [&](const Eigen::VectorXd& flat) {
      const auto s = SquashedGaussian::from_head(Eigen::Map<const Eigen::MatrixXd>(flat.data(), 2 * a, n), noise);
      return s.action.cwiseProduct(wa).sum() + s.log_prob.cwiseProduct(wl).sum();
    };
    const Eigen::MatrixXd grad = g.head_gradient(wa, wl);
    CHECK(test::max_fd_error(Eigen::Map<const Eigen::VectorXd>(head.data(), head.size()),
                             Eigen::Map<const Eigen::VectorXd>(grad.data(), grad.size()), loss) < 1e-4);
  }
}

TEST_CASE("loss gradients against finite differences") {
  std::mt19937_64 rng(5);
  const int obs = 4, act = 2, n = 6;
  const Batch batch = random_batch(n, obs, act, rng);
  const auto q1 = DenseNetd::random({obs + act, 8, 8, 1}, rng);
  const auto q2 = DenseNetd::random({obs + act, 8, 8, 1}, rng);

  SUBCASE("twin critic regression") {
    const Eigen::VectorXd y = test::random_matrix(n, 1, rng);
    const auto l = twin_critic_loss(q1, q2, batch.obs, batch.actions, y, 0.5);
    auto f1 = [&](const Eigen::VectorXd& p) {
      return twin_critic_loss(with_params(q1, p), q2, batch.obs, batch.actions, y, 0.5).loss;
    };
    auto f2 = [&](const Eigen::VectorXd& p) {
      return twin_critic_loss(q1, with_params(q2, p), batch.obs, batch.actions, y, 0.5).loss;
    };
    CHECK(test::max_fd_error(q1.parameters(), l.grad_q1, f1) < 1e-4);
    CHECK(test::max_fd_error(q2.parameters(), l.grad_q2, f2) < 1e-4);
  }
  SUBCASE("soft actor objective") {
    const auto actor = DenseNetd::random({obs, 8, 8, 2 * act}, rng);
    const Eigen::MatrixXd noise = test::random_matrix(act, n, rng);
    const auto l = sac_actor_loss(actor, q1, q2, batch.obs, noise, 0.2);
    auto f = [&](const Eigen::VectorXd& p) { return sac_actor_loss(with_params(actor, p), q1, q2, batch.obs, noise, 0.2).loss; };
    CHECK(test::max_fd_error(actor.parameters(), l.grad, f) < 1e-4);
  }
  SUBCASE("deterministic actor objective") {
    const auto actor = DenseNetd::random({obs, 8, 8, act}, rng);
    const auto l = td3_actor_loss(actor, q1, batch.obs);
    auto f = [&](const Eigen::VectorXd& p) { return td3_actor_loss(with_params(actor, p), q1, batch.obs).loss; };
    CHECK(test::max_fd_error(actor.parameters(), l.grad, f) < 1e-4);
  }
  SUBCASE("clipped surrogate, value and entropy terms") {
    auto cfg = AgentConfig::defaults(Algorithm::ppo);
    cfg.ent_coef = 0.01;
    const auto actor = DenseNetd::random({obs, 8, act}, rng);
    const auto value = DenseNetd::random({obs, 8, 1}, rng);
    const Eigen::VectorXd log_std = test::random_matrix(act, 1, rng, 0.3);
    PpoMinibatch mb{batch.obs, test::random_matrix(act, n, rng), Eigen::VectorXd(n), test::random_matrix(n, 1, rng),
                    test::random_matrix(n, 1, rng)};
    const Eigen::MatrixXd mean = actor.forward(batch.obs);
    for (int j = 0; j < n; ++j)
      mb.old_log_probs(j) = gaussian_log_prob(mb.pre_tanh.col(j), mean.col(j), log_std) + 0.15 * (j % 3 - 1);
    const auto l = ppo_loss(actor, log_std, value, mb, cfg);
    auto fa = [&](const Eigen::VectorXd& p) { return ppo_loss(with_params(actor, p), log_std, value, mb, cfg).total; };
    auto fs = [&](const Eigen::VectorXd& s) { return ppo_loss(actor, s, value, mb, cfg).total; };
    auto fv = [&](const Eigen::VectorXd& p) { return ppo_loss(actor, log_std, with_params(value, p), mb, cfg).total; };
    CHECK(test::max_fd_error(actor.parameters(), l.grad_actor, fa) < 1e-4);
    CHECK(test::max_fd_error(log_std, l.grad_log_std, fs) < 1e-4);
    CHECK(test::max_fd_error(value.parameters(), l.grad_value, fv) < 1e-4);
  }
}

TEST_CASE("sac update") {
  std::mt19937_64 rng(6);
  auto cfg = AgentConfig::defaults(Algorithm::sac);
  cfg.hidden = {16, 16};
  cfg.batch_size = 32;
  SacAgent agent(cfg, 5, 2);
  const Batch batch = random_batch(32, 5, 2, rng);
  const Eigen::VectorXd q1_before = agent.q1_target().parameters();

  const auto losses = agent.update(batch);
  CHECK(std::isfinite(losses.critic));
  CHECK(std::isfinite(losses.actor));
  CHECK(std::isfinite(losses.alpha_loss));
  const Eigen::VectorXd expected = 0.995 * q1_before + 0.005 * agent.q1().parameters();
  CHECK((agent.q1_target().parameters() - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(agent.target_entropy() == -2.0);

  SacAgent empty(cfg, 5, 2);
  CHECK_THROWS_AS(empty.update(), NotEnoughSamples);
}

TEST_CASE("td3 update") {
  std::mt19937_64 rng(7);
  auto cfg = AgentConfig::defaults(Algorithm::td3);
  cfg.hidden = {16, 12};
  Td3Agent agent(cfg, 5, 2);
  const Batch batch = random_batch(16, 5, 2, rng);

  SUBCASE("actor frozen on critic-only steps") {
    const Eigen::VectorXd actor_before = agent.actor().parameters();
    const Eigen::VectorXd target_before = agent.q1_target().parameters();
    const auto first = agent.update(batch);
    CHECK_FALSE(first.actor_updated);
    CHECK(agent.actor().parameters() == actor_before);
    CHECK(agent.q1_target().parameters() == target_before);
    const auto second = agent.update(batch);
    CHECK(second.actor_updated);
    CHECK(agent.actor().parameters() != actor_before);
  }
  SUBCASE("target uses the smaller target critic") {
    const Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(2, 16);
    const Eigen::VectorXd y = td3_targets(agent.actor_target(), agent.q1_target(), agent.q2_target(), batch, noise,
                                          0.5, cfg.gamma);
    const Eigen::MatrixXd next = agent.actor_target().forward(batch.next_obs).array().tanh().matrix();
    const auto in = critic_input(batch.next_obs, next);
    for (int j = 0; j < 16; ++j) {
      const double q = std::min(agent.q1_target().forward(in)(0, j), agent.q2_target().forward(in)(0, j));
      CHECK(y(j) == doctest::Approx(batch.rewards(j) + cfg.gamma * (1 - batch.dones(j)) * q).epsilon(1e-12));
    }
  }
}

TEST_CASE("ppo pieces") {
  std::mt19937_64 rng(8);
  SUBCASE("normalized advantages") {
    const Eigen::VectorXd adv = normalize_advantages(test::random_matrix(500, 1, rng, 3.0).array() + 2.0);
    CHECK(std::abs(adv.mean()) < 1e-12);
    const double sd = std::sqrt((adv.array() - adv.mean()).square().sum() / 499.0);
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("ratio one gives minus the mean advantage") {
    auto cfg = AgentConfig::defaults(Algorithm::ppo);
    const auto actor = DenseNetd::random({3, 8, 2}, rng);
    const auto value = DenseNetd::random({3, 8, 1}, rng);
    const Eigen::VectorXd log_std = Eigen::VectorXd::Zero(2);
    PpoMinibatch mb{test::random_matrix(3, 10, rng), test::random_matrix(2, 10, rng), Eigen::VectorXd(10),
                    test::random_matrix(10, 1, rng), test::random_matrix(10, 1, rng)};
    const Eigen::MatrixXd mean = actor.forward(mb.obs);
    for (int j = 0; j < 10; ++j) mb.old_log_probs(j) = gaussian_log_prob(mb.pre_tanh.col(j), mean.col(j), log_std);
    CHECK(ppo_loss(actor, log_std, value, mb, cfg).policy == doctest::Approx(-mb.advantages.mean()).epsilon(1e-12));
  }
  SUBCASE("short rollout") {
    auto cfg = AgentConfig::defaults(Algorithm::ppo);
    cfg.n_steps = 8;
    cfg.batch_size = 4;
    PpoAgent agent(cfg, 3, 2);
    Rollout r{Eigen::MatrixXd::Zero(3, 5), Eigen::MatrixXd::Zero(2, 5), Eigen::VectorXd::Zero(5),
              Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(5), 0.0};
    CHECK_THROWS_AS(agent.update(r), RolloutTooShort);
  }
}

TEST_CASE("bandit convergence" * doctest::timeout(300)) {
  SUBCASE("sac") {
    auto agent = make_agent(bandit_config(Algorithm::sac), 1, 1);
    CHECK(std::abs(run_bandit(*agent, 5100) - 0.3) < 0.05);
  }
  SUBCASE("td3") {
    auto agent = make_agent(bandit_config(Algorithm::td3), 1, 1);
    CHECK(std::abs(run_bandit(*agent, 5100) - 0.3) < 0.05);
  }
  SUBCASE("ppo") {
    auto agent = make_agent(bandit_config(Algorithm::ppo), 1, 1);
    CHECK(std::abs(run_bandit(*agent, 256 * 20) - 0.3) < 0.05);
  }
}

TEST_CASE("agents are bit-reproducible") {
  for (auto algo : {Algorithm::sac, Algorithm::td3, Algorithm::ppo}) {
    auto cfg = bandit_config(algo);
    cfg.learning_starts = 20;
    cfg.batch_size = 16;
    if (algo == Algorithm::ppo) cfg.n_steps = 64;
    auto a = make_agent(cfg, 1, 1);
    auto b = make_agent(cfg, 1, 1);
    run_bandit(*a, 200);
    run_bandit(*b, 200);
    CHECK(a->actor().parameters() == b->actor().parameters());
    CHECK(a->updates() > 0);
  }
}

TEST_CASE("policy act and checkpoints") {
  std::mt19937_64 rng(9);
  TrainedPolicy p;
  p.config = AgentConfig::defaults(Algorithm::td3);
  p.building = "five_zone";
  p.action_dim = 2;
  p.actor = DenseNetd::random({3, 4, 2}, rng);
  p.normalizer = env::MinMaxNormalizer(Eigen::Vector3d(0, -1, 2), Eigen::Vector3d(1, 1, 3));

  SUBCASE("squashed endpoints map onto setpoint limits") {
    const auto low = env::action_from_unit(Eigen::Vector2d(-1, -1));
    const auto high = env::action_from_unit(Eigen::Vector2d(1, 1));
    CHECK(low[0].heating == 15.0);
    CHECK(high[0].heating == 22.5);
  }
  SUBCASE("deterministic act repeats") {
    const Eigen::Vector3d obs(0.2, 0.4, 0.6);
    CHECK(p.act(obs) == p.act(obs));
    CHECK_THROWS_AS(p.act(Eigen::Vector2d(0, 0)), ShapeMismatch);
  }
  SUBCASE("json round trip is exact") {
    CHECK(policy_from_json(to_json(p)) == p);
  }
  SUBCASE("corrupt checkpoint") {
    CHECK_THROWS_AS(policy_from_json("{\"format\": \"other\"}"), ConfigError);
    CHECK_THROWS_AS(policy_from_json("not json"), ConfigError);
  }
}

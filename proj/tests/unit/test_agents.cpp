#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "fd.hpp"
#include "tricritic/agents/agent.hpp"
#include "tricritic/agents/target_rule.hpp"
#include "tricritic/agents/training.hpp"
#include "tricritic/diffcore/adam.hpp"
#include "tricritic/envs/reacher.hpp"
#include "tricritic/envs/registry.hpp"
#include "tricritic/errors.hpp"
#include "tricritic/rng.hpp"

using namespace tricritic;

namespace {

const EnvSpec kPendulumSpec{3, 1, 2.0, 200};

AgentConfig small_config() {
  AgentConfig c;
  c.batch_size = 16;
  c.warmup_steps = 10;
  c.buffer_capacity = 10000;
  return c;
}

NetworkConfig small_net(HiddenActivation act = HiddenActivation::ReLU) { return {{8, 8}, act}; }

Agent make_agent(TargetRule rule, AgentConfig cfg = small_config(), EnvSpec env = kPendulumSpec,
                 NetworkConfig net = small_net(), std::uint64_t seed = 1) {
  return Agent(env, rule, cfg, net, seed);
}

Batch random_batch(const EnvSpec& env, std::size_t n, std::uint64_t seed, double mask = 1.0) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Transition> ts;
  for (std::size_t i = 0; i < n; ++i) {
    Transition t;
    for (std::size_t k = 0; k < env.state_dim; ++k) t.state.push_back(u(rng));
    for (std::size_t k = 0; k < env.action_dim; ++k) t.action.push_back(env.action_bound * u(rng));
    t.reward = u(rng);
    for (std::size_t k = 0; k < env.state_dim; ++k) t.next_state.push_back(u(rng));
    t.done_mask = mask;
    ts.push_back(t);
  }
  return make_batch(ts);
}

// Critic parameters whose output is the constant q.
ParamVector constant_critic(const MlpSpec& spec, double q) {
  ParamVector p(spec.param_count());
  p.values.back() = q;
  return p;
}

void zero(ParamVector& p) { std::fill(p.values.begin(), p.values.end(), 0.0); }

}  // namespace

TEST_SUITE("agents") {
  TEST_CASE("rule names round-trip") {
    for (auto r : {TargetRule::Single, TargetRule::ClippedDouble, TargetRule::Triplet})
      CHECK(parse_rule(rule_name(r)) == r);
    CHECK_THROWS_AS(parse_rule("tcd3x"), ConfigError);
  }

  TEST_CASE("target examples") {
    const std::vector<double> q = {1.0, 2.0, 1.5};
    CHECK(td_target(TargetRule::Triplet, q, 0.0, 1.0, 0.99) == doctest::Approx(1.485));
    for (auto r : {TargetRule::Single, TargetRule::ClippedDouble, TargetRule::Triplet}) {
      const std::span<const double> qs(q.data(), critic_count(r));
      CHECK(td_target(r, qs, 0.37, 0.0, 0.99) == 0.37);
      const std::vector<double> same(critic_count(r), 4.0);
      CHECK(td_target(r, same, 1.0, 1.0, 0.5) == 3.0);
    }
    CHECK_THROWS_AS(combine_critic_values(TargetRule::Triplet, std::vector<double>{1.0, 2.0}), UsageError);
  }

  TEST_CASE("target rule algebra on random triples") {
    Rng rng = make_rng(31);
    std::normal_distribution<double> n(0.0, 10.0);
    std::size_t order_sensitive = 0;
    for (int i = 0; i < 100000; ++i) {
      const double a = n(rng), b = n(rng), c = n(rng);
      const double t = combine_critic_values(TargetRule::Triplet, std::vector<double>{a, b, c});
      CHECK(t <= std::max(a, b));
      CHECK(t >= std::min({a, b, c}));
      CHECK(t == combine_critic_values(TargetRule::Triplet, std::vector<double>{b, a, c}));
      if (c >= std::max(a, b)) CHECK(t == std::max(a, b));
      CHECK(combine_critic_values(TargetRule::Triplet, std::vector<double>{a, b, std::min(a, b)}) ==
            combine_critic_values(TargetRule::ClippedDouble, std::vector<double>{a, b}));
      order_sensitive += t != combine_critic_values(TargetRule::Triplet, std::vector<double>{c, b, a});
    }
    CHECK(order_sensitive > 0);
  }

  TEST_CASE("compute_target from explicit target critics") {
    const Agent agent = make_agent(TargetRule::Triplet);
    const auto& cs = agent.critic_spec();
    const std::vector<ParamVector> crit = {constant_critic(cs, 1.0), constant_critic(cs, 2.0),
                                           constant_critic(cs, 1.5)};
    const std::vector<double> s = {0.1, 0.2, 0.3}, a = {0.5};
    CHECK(compute_target(TargetRule::Triplet, cs, crit, s, a, 0.0, 1.0, 0.99) == doctest::Approx(1.485));
    CHECK(compute_target(TargetRule::ClippedDouble, cs, std::span(crit).first(2), s, a, 0.5, 1.0, 0.99) ==
          doctest::Approx(1.49));
    CHECK(compute_target(TargetRule::Single, cs, std::span(crit).first(1), s, a, 0.5, 0.0, 0.99) == 0.5);
    CHECK_THROWS_AS(compute_target(TargetRule::Triplet, cs, std::span(crit).first(2), s, a, 0.0, 1.0, 0.99),
                    UsageError);
  }

  TEST_CASE("critics start from distinct initializations") {
    const Agent agent = make_agent(TargetRule::Triplet);
    CHECK(agent.critic_count() == 3);
    CHECK(agent.critic(0) != agent.critic(1));
    CHECK(agent.critic(1) != agent.critic(2));
    for (std::size_t i = 0; i < 3; ++i) CHECK(agent.target_critic(i) == agent.critic(i));
    CHECK(agent.target_actor() == agent.actor());
    CHECK(make_agent(TargetRule::Single).critic_count() == 1);
  }

  TEST_CASE("select_action") {
    AgentConfig cfg = small_config();
    Agent agent = make_agent(TargetRule::ClippedDouble, cfg);
    agent.set_steps(cfg.warmup_steps);
    const std::vector<double> s = {0.3, -0.2, 0.9};
    Rng rng = make_rng(3);
    const auto greedy = agent.policy_action(s);
    CHECK(agent.select_action(s, false, rng) == greedy);
    CHECK(agent.select_action(s, false, rng) == greedy);

    cfg.exploration_noise_std = 0.0;
    Agent quiet = make_agent(TargetRule::ClippedDouble, cfg);
    quiet.set_steps(cfg.warmup_steps);
    CHECK(quiet.select_action(s, true, rng) == quiet.policy_action(s));

    // Saturated actor: output is +bound and noise can only be clamped away.
    zero(agent.mutable_actor());
    agent.mutable_actor().values.back() = 1000.0;
    REQUIRE(agent.policy_action(s)[0] == 2.0);
    std::size_t at_bound = 0;
    for (int i = 0; i < 200; ++i) {
      const double a = agent.select_action(s, true, rng)[0];
      CHECK(a <= 2.0);
      at_bound += a == 2.0;
    }
    CHECK(at_bound > 50);
  }

  TEST_CASE("warmup actions are uniform over the box") {
    Agent agent = make_agent(TargetRule::Triplet);
    Rng rng = make_rng(4);
    const std::vector<double> s = {1.0, 0.0, 0.0};
    double sum = 0.0, lo = 10.0, hi = -10.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double a = agent.select_action(s, true, rng)[0];
      sum += a;
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    CHECK(std::fabs(sum / n) < 4 * 2.0 / std::sqrt(3.0 * n));
    CHECK(lo >= -2.0);
    CHECK(hi <= 2.0);
    CHECK(lo < -1.99);
    CHECK(hi > 1.99);
  }

  TEST_CASE("smoothed target actions") {
    AgentConfig cfg = small_config();
    cfg.target_noise_std = 0.0;
    Agent a0 = make_agent(TargetRule::Triplet, cfg);
    Rng rng = make_rng(5);
    const std::vector<double> s = {0.1, 0.5, -0.4};
    CHECK(a0.smoothed_target_action(s, rng) == mlp_forward(a0.actor_spec(), a0.target_actor(), s));

    cfg.target_noise_std = 100.0;
    Agent big = make_agent(TargetRule::Triplet, cfg);
    const double base = mlp_forward(big.actor_spec(), big.target_actor(), s)[0];
    for (int i = 0; i < 500; ++i) CHECK(std::fabs(big.smoothed_target_action(s, rng)[0] - base) <= 0.5 + 1e-12);
  }

  TEST_CASE("target smoothing noise is a clipped Gaussian") {
    AgentConfig cfg = small_config();
    cfg.target_noise_std = 0.2;
    cfg.target_noise_clip = 0.5;
    Agent agent = make_agent(TargetRule::Triplet, cfg);
    zero(agent.mutable_target_actor());  // pi'(s') = 0, so the action is the noise itself
    const std::size_t n = 100000;
    Matrix next(n, 3, 0.0), out;
    Rng rng = make_rng(6);
    agent.smoothed_target_actions(next, rng, out);
    std::size_t upper = 0, lower = 0;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = out(i, 0);
      upper += v[i] == 0.5;
      lower += v[i] == -0.5;
      CHECK(std::fabs(v[i]) <= 0.5);
    }
    const double tail = 0.5 * std::erfc(2.5 / std::sqrt(2.0));  // P(Z > 0.5 / 0.2)
    CHECK(std::fabs(static_cast<double>(upper) / n - tail) < 0.01);
    CHECK(std::fabs(static_cast<double>(lower) / n - tail) < 0.01);
    const double se = std::sqrt(tail * (1 - tail) / n);
    CHECK(std::fabs(static_cast<double>(upper) / n - tail) < 4 * se);
    CHECK(std::fabs(static_cast<double>(lower) / n - tail) < 4 * se);
    for (double x : {-0.3, -0.1, 0.0, 0.2, 0.4}) {
      const double cdf = 0.5 * std::erfc(-x / (0.2 * std::sqrt(2.0)));
      const double emp = static_cast<double>(std::count_if(v.begin(), v.end(), [&](double y) { return y <= x; })) / n;
      CHECK(std::fabs(emp - cdf) < 0.01);
    }
  }

  TEST_CASE("critic update with zero residual changes nothing") {
    Agent agent = make_agent(TargetRule::Triplet);
    for (std::size_t i = 0; i < 3; ++i) {
      agent.mutable_critic(i) = constant_critic(agent.critic_spec(), 0.25);
      agent.mutable_target_critic(i) = agent.critic(i);
    }
    Batch batch = random_batch(kPendulumSpec, 8, 1, 0.0);
    std::fill(batch.rewards.begin(), batch.rewards.end(), 0.25);
    const auto before = agent.critic(1);
    Rng rng = make_rng(7);
    const auto res = agent.critic_update(batch, rng);
    for (double l : res.losses) CHECK(l == 0.0);
    CHECK(agent.critic(1) == before);
    CHECK(agent.critic_optimizer(1).step_count == 1);
  }

  TEST_CASE("single-transition loss is the squared residual") {
    const Agent agent = make_agent(TargetRule::Single);
    const Batch batch = random_batch(kPendulumSpec, 1, 2);
    const std::vector<double> y = {0.8};
    std::vector<double> sa(batch.states.row(0).begin(), batch.states.row(0).end());
    sa.push_back(batch.actions(0, 0));
    const double q = mlp_forward(agent.critic_spec(), agent.critic(0), sa)[0];
    CHECK(critic_loss_and_gradient(agent.critic_spec(), agent.critic(0), batch, y, nullptr) ==
          doctest::Approx((0.8 - q) * (0.8 - q)).epsilon(1e-14));
  }

  TEST_CASE("critic and actor gradients match finite differences") {
    for (auto act : {HiddenActivation::Tanh, HiddenActivation::ReLU}) {
      const Agent agent = make_agent(TargetRule::ClippedDouble, small_config(), kPendulumSpec, small_net(act), 12);
      const Batch batch = random_batch(kPendulumSpec, 6, 3);
      const std::vector<double> y = {0.1, -0.5, 0.3, 0.9, -1.0, 0.0};

      ParamVector critic = agent.critic(0);
      ParamVector cg(critic.size());
      critic_loss_and_gradient(agent.critic_spec(), critic, batch, y, &cg);
      const auto cn = fd::gradient(critic.values, [&] {
        return critic_loss_and_gradient(agent.critic_spec(), critic, batch, y, nullptr);
      });
      CHECK(fd::max_rel_error(cg.values, cn) < 1e-4);

      ParamVector actor = agent.actor();
      ParamVector ag(actor.size());
      actor_objective_and_gradient(agent.actor_spec(), actor, agent.critic_spec(), agent.critic(0), batch.states, &ag);
      const auto an = fd::gradient(actor.values, [&] {
        return actor_objective_and_gradient(agent.actor_spec(), actor, agent.critic_spec(), agent.critic(0),
                                            batch.states, nullptr);
      });
      CHECK(fd::max_rel_error(ag.values, an) < 1e-4);
    }
  }

  TEST_CASE("critic update shares one target across critics") {
    AgentConfig cfg = small_config();
    cfg.target_noise_std = 0.0;
    Agent agent = make_agent(TargetRule::Triplet, cfg);
    const Batch batch = random_batch(kPendulumSpec, 10, 4);
    std::vector<ParamVector> targets;
    for (std::size_t i = 0; i < 3; ++i) targets.push_back(agent.target_critic(i));
    std::vector<double> expected;
    for (std::size_t r = 0; r < batch.size(); ++r) {
      const std::vector<double> s2(batch.next_states.row(r).begin(), batch.next_states.row(r).end());
      const auto a2 = mlp_forward(agent.actor_spec(), agent.target_actor(), s2);
      expected.push_back(compute_target(TargetRule::Triplet, agent.critic_spec(), targets, s2, a2, batch.rewards[r],
                                        batch.done_masks[r], cfg.gamma));
    }
    Rng rng = make_rng(1);
    const auto res = agent.critic_update(batch, rng);
    REQUIRE(res.targets.size() == expected.size());
    for (std::size_t r = 0; r < expected.size(); ++r) CHECK(res.targets[r] == doctest::Approx(expected[r]).epsilon(1e-13));
    CHECK(res.losses.size() == 3);
  }

  TEST_CASE("non-finite losses abort the critic step") {
    Agent agent = make_agent(TargetRule::ClippedDouble);
    Batch batch = random_batch(kPendulumSpec, 4, 5, 0.0);
    batch.rewards[2] = 1e300;
    const auto before = agent.critic(0);
    Rng rng = make_rng(1);
    try {
      agent.critic_update(batch, rng);
      FAIL("expected a numeric error");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
    CHECK(agent.critic(0) == before);
    CHECK(agent.critic_optimizer(0).step_count == 0);
  }

  TEST_CASE("updates are decoupled") {
    Agent agent = make_agent(TargetRule::Triplet);
    const Batch batch = random_batch(kPendulumSpec, 16, 6);
    Rng rng = make_rng(2);
    const auto actor = agent.actor(), target_actor = agent.target_actor();
    agent.critic_update(batch, rng);
    CHECK(agent.actor() == actor);
    CHECK(agent.target_actor() == target_actor);
    std::vector<ParamVector> critics;
    for (std::size_t i = 0; i < 3; ++i) critics.push_back(agent.critic(i));
    agent.actor_update(batch);
    CHECK(agent.actor() != actor);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(agent.critic(i) == critics[i]);
      CHECK(agent.target_critic(i) != agent.critic(i));
    }
  }

  TEST_CASE("actor is unchanged when the critic ignores the action") {
    Agent agent = make_agent(TargetRule::ClippedDouble);
    const auto& cs = agent.critic_spec();
    for (std::size_t o = 0; o < cs.widths[1]; ++o) agent.mutable_critic(0).values[cs.weight_offset(0) + o * 4 + 3] = 0.0;
    const auto actor = agent.actor();
    agent.actor_update(random_batch(kPendulumSpec, 8, 7));
    CHECK(agent.actor() == actor);
  }

  TEST_CASE("actor climbs a quadratic critic") {
    const EnvSpec env{1, 1, 2.0, 10};
    AgentConfig cfg = small_config();
    cfg.actor_lr = 1e-3;
    Agent agent = make_agent(TargetRule::Single, cfg, env, {{32}, HiddenActivation::Tanh}, 3);
    // Fit Q(s, a) = -(a - 0.7)^2 first.
    const double a_star = 0.7;
    auto opt = make_optimizer(agent.critic(0).size(), {1e-2});
    Rng rng = make_rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int it = 0; it < 3000; ++it) {
      Batch b = random_batch(env, 64, 100 + it);
      std::vector<double> y(64);
      for (std::size_t r = 0; r < 64; ++r) y[r] = -(b.actions(r, 0) - a_star) * (b.actions(r, 0) - a_star);
      ParamVector g(agent.critic(0).size());
      critic_loss_and_gradient(agent.critic_spec(), agent.critic(0), b, y, &g);
      adam_step(opt, agent.mutable_critic(0), g);
    }
    const Batch states = random_batch(env, 32, 9);
    const double start_gap = std::fabs(agent.policy_action(std::vector<double>{0.0})[0] - a_star);
    double prev = -1e300;
    bool monotone = true;
    for (int it = 0; it < 100; ++it) {
      const double j = agent.actor_update(states);
      monotone = monotone && j >= prev;
      prev = j;
    }
    CHECK(monotone);
    CHECK(std::fabs(agent.policy_action(std::vector<double>{0.0})[0] - a_star) < start_gap);
  }

  TEST_CASE("soft update") {
    Agent agent = make_agent(TargetRule::Triplet);
    agent.soft_update(0.0);
    Agent copy = agent;
    agent.mutable_actor().values[0] += 1.0;
    agent.soft_update(0.0);
    CHECK(agent.target_actor() == copy.target_actor());
    agent.soft_update(1.0);
    CHECK(agent.target_actor() == agent.actor());
    for (std::size_t i = 0; i < 3; ++i) {
      agent.mutable_critic(i).values.assign(agent.critic(i).size(), 2.0);
      agent.mutable_target_critic(i).values.assign(agent.critic(i).size(), 0.0);
    }
    agent.soft_update(0.5);
    for (std::size_t i = 0; i < 3; ++i)
      for (double v : agent.target_critic(i).values) CHECK(v == 1.0);
  }

  TEST_CASE("training respects warmup and the policy delay") {
    AgentConfig cfg = small_config();
    cfg.warmup_steps = 50;
    cfg.policy_delay = 3;
    TrainingSession session(make_agent(TargetRule::Triplet, cfg), make_env("pendulum"), 5);
    const auto actor0 = session.agent().actor();
    const auto critic0 = session.agent().critic(2);
    for (std::size_t t = 1; t <= 50; ++t) {
      const auto m = train_step(session);
      CHECK_FALSE(m.critics_updated);
      CHECK(m.critic_losses.empty());
    }
    CHECK(session.buffer().size() == 50);
    CHECK(session.agent().actor() == actor0);
    CHECK(session.agent().critic(2) == critic0);

    std::size_t critic_since_actor = 0, actor_updates = 0;
    for (std::size_t t = 51; t <= 200; ++t) {
      auto before = session.agent().actor();
      const auto m = train_step(session);
      CHECK(m.step == t);
      CHECK(m.critics_updated);
      CHECK(m.critic_losses.size() == 3);
      ++critic_since_actor;
      CHECK(m.actor_updated == (t % 3 == 0));
      CHECK((session.agent().actor() != before) == m.actor_updated);
      if (m.actor_updated) {
        if (actor_updates++ > 0) CHECK(critic_since_actor == 3);
        critic_since_actor = 0;
      }
    }
    CHECK(session.agent().critic_updates() == 150);
    CHECK(session.agent().actor_updates() == 50);
  }

  TEST_CASE("terminal transitions store mask 0, truncations mask 1") {
    AgentConfig cfg = small_config();
    cfg.warmup_steps = 1000;
    TrainingSession pend(make_agent(TargetRule::ClippedDouble, cfg), make_env("pendulum"), 1);
    for (int t = 0; t < 201; ++t) train_step(pend);
    CHECK(pend.buffer().at(199).done_mask == 1.0);
    CHECK(pend.episodes() == 1);

    const EnvSpec rs = ReacherEnv().spec();
    TrainingSession reach(make_agent(TargetRule::ClippedDouble, cfg, rs), make_env("reacher"), 1);
    std::size_t terminals = 0;
    for (int t = 0; t < 1000; ++t) {
      const auto m = train_step(reach);
      const auto last = reach.buffer().at(reach.buffer().size() - 1);
      CHECK(last.done_mask == (m.done ? 0.0 : 1.0));
      terminals += m.done;
    }
    MESSAGE("reacher captures under random actions: " << terminals);
  }

  TEST_CASE("training is bit-reproducible") {
    auto run = [] {
      AgentConfig cfg = small_config();
      cfg.warmup_steps = 200;
      cfg.batch_size = 32;
      TrainingSession s(make_agent(TargetRule::Triplet, cfg, kPendulumSpec, small_net(), 77), make_env("pendulum"), 77);
      std::vector<StepMetrics> ms;
      for (int t = 0; t < 5000; ++t) ms.push_back(train_step(s));
      return std::make_pair(ms, s.agent().actor());
    };
    const auto a = run(), b = run();
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
  }

  TEST_CASE("agent checkpoints round-trip") {
    AgentConfig cfg = small_config();
    TrainingSession s(make_agent(TargetRule::Triplet, cfg), make_env("pendulum"), 3);
    for (int t = 0; t < 60; ++t) train_step(s);
    const auto path = std::filesystem::temp_directory_path() / "tricritic_agent_roundtrip.bin";
    s.agent().save(path);
    Agent fresh = make_agent(TargetRule::Triplet, cfg, kPendulumSpec, small_net(), 999);
    fresh.load(path);
    CHECK(fresh.steps() == s.agent().steps());
    CHECK(fresh.actor() == s.agent().actor());
    CHECK(fresh.actor_optimizer() == s.agent().actor_optimizer());
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(fresh.critic(i) == s.agent().critic(i));
      CHECK(fresh.target_critic(i) == s.agent().target_critic(i));
      CHECK(fresh.critic_optimizer(i) == s.agent().critic_optimizer(i));
    }
    Agent wrong = make_agent(TargetRule::ClippedDouble, cfg);
    CHECK_THROWS(wrong.load(path));
    std::filesystem::remove(path);
  }
}

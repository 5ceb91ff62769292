#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tricritic/envs/pendulum.hpp"
#include "tricritic/envs/reacher.hpp"
#include "tricritic/envs/registry.hpp"
#include "tricritic/envs/reward_wrapper.hpp"
#include "tricritic/errors.hpp"
#include "tricritic/rng.hpp"

using namespace tricritic;
using std::numbers::pi;

namespace {

std::vector<double> random_actions(std::size_t n, double bound, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-bound, bound);
  std::vector<double> a(n);
  for (auto& x : a) x = u(rng);
  return a;
}

// Independent pendulum integrator: velocity first, then angle from the new velocity.
struct PendulumOracle {
  double theta, omega;
  double step(double u) {
    u = std::clamp(u, -2.0, 2.0);
    double th = std::remainder(theta, 2 * pi);
    if (th == -pi) th = pi;
    const double r = -(th * th + 0.1 * omega * omega + 0.001 * u * u);
    omega = std::clamp(omega + (3 * 10.0 / 2 * std::sin(theta) + 3.0 * u) * 0.05, -8.0, 8.0);
    theta = theta + omega * 0.05;
    return r;
  }
};

}  // namespace

TEST_SUITE("envs") {
  TEST_CASE("pendulum reset is deterministic and within the initial ranges") {
    PendulumEnv env;
    CHECK(env.reset(42) == env.reset(42));
    for (std::uint64_t s = 0; s < 1000; ++s) {
      const auto obs = env.reset(s);
      CHECK(env.theta() >= -pi);
      CHECK(env.theta() <= pi);
      CHECK(std::fabs(env.omega()) <= 1.0);
      CHECK(obs[0] == doctest::Approx(std::cos(env.theta())).epsilon(1e-15));
      CHECK(obs[1] == doctest::Approx(std::sin(env.theta())).epsilon(1e-15));
      CHECK(obs[2] == env.omega());
    }
    CHECK(env.reset(1) != env.reset(2));
  }

  TEST_CASE("pendulum reward examples") {
    PendulumEnv env;
    env.set_state(0.0, 0.0);
    auto r = env.step(std::vector<double>{0.0});
    CHECK(r.reward == 0.0);
    CHECK(env.theta() == 0.0);
    CHECK(env.omega() == 0.0);
    CHECK_FALSE(r.done);

    env.set_state(pi, 0.0);
    r = env.step(std::vector<double>{0.0});
    CHECK(r.reward == doctest::Approx(-9.8696044).epsilon(1e-7));
  }

  TEST_CASE("angle wrapping maps into (-pi, pi] with pi kept") {
    CHECK(wrap_angle(pi) == pi);
    CHECK(wrap_angle(-pi) == pi);
    CHECK(wrap_angle(3 * pi) == doctest::Approx(pi));
    CHECK(wrap_angle(0.5) == 0.5);
    CHECK(wrap_angle(2 * pi + 0.25) == doctest::Approx(0.25));
    CHECK(wrap_angle(-2 * pi - 0.25) == doctest::Approx(-0.25));
  }

  TEST_CASE("pendulum dynamics match an independent integrator") {
    PendulumEnv env;
    env.reset(9);
    PendulumOracle o{env.theta(), env.omega()};
    const auto acts = random_actions(200, 3.0, 1);
    for (double a : acts) {
      const auto r = env.step(std::vector<double>{a});
      const double expected = o.step(a);
      CHECK(r.reward == doctest::Approx(expected).epsilon(1e-12));
      CHECK(std::cos(env.theta()) == doctest::Approx(std::cos(o.theta)).epsilon(1e-9));
      CHECK(env.omega() == doctest::Approx(o.omega).epsilon(1e-9));
    }
  }

  TEST_CASE("pendulum truncates at exactly 200 steps and refuses further steps") {
    PendulumEnv env;
    env.reset(3);
    for (std::size_t t = 1; t <= 200; ++t) {
      const auto r = env.step(std::vector<double>{0.5});
      CHECK_FALSE(r.done);
      CHECK(r.truncated == (t == 200));
      CHECK(std::fabs(env.omega()) <= PendulumEnv::kMaxSpeed);
    }
    CHECK_THROWS_AS(env.step(std::vector<double>{0.0}), UsageError);
    PendulumEnv fresh;
    CHECK_THROWS_AS(fresh.step(std::vector<double>{0.0}), UsageError);
  }

  TEST_CASE("pendulum clamps actions and rejects malformed ones") {
    PendulumEnv a, b;
    a.set_state(1.0, 0.0);
    b.set_state(1.0, 0.0);
    CHECK(a.step(std::vector<double>{50.0}).next_state == b.step(std::vector<double>{2.0}).next_state);
    CHECK_THROWS_AS(a.step(std::vector<double>{1.0, 2.0}), ShapeError);
    CHECK_THROWS_AS(a.step(std::vector<double>{NAN}), NumericError);
  }

  TEST_CASE("trajectories are fully determined by seed and actions") {
    for (const auto& id : env_ids()) {
      auto e1 = make_env(id), e2 = make_env(id);
      const auto acts = random_actions(400, e1->spec().action_bound, 4);
      auto s1 = e1->reset(17), s2 = e2->reset(17);
      CHECK(s1 == s2);
      const std::size_t ad = e1->spec().action_dim;
      for (std::size_t t = 0; t + ad <= acts.size(); t += ad) {
        std::span<const double> a(acts.data() + t, ad);
        const auto r1 = e1->step(a), r2 = e2->step(a);
        CHECK(r1.next_state == r2.next_state);
        CHECK(r1.reward == r2.reward);
        for (double v : r1.next_state) CHECK(std::isfinite(v));
        if (r1.done || r1.truncated) break;
      }
    }
  }

  TEST_CASE("reacher reset places agent and goal apart inside the unit box") {
    ReacherEnv env;
    CHECK(env.reset(5) == env.reset(5));
    for (std::uint64_t s = 0; s < 1000; ++s) {
      const auto o = env.reset(s);
      for (std::size_t i = 0; i < 4; ++i) {
        CHECK(o[i] >= 0.0);
        CHECK(o[i] <= 1.0);
      }
      CHECK(std::hypot(o[0] - o[2], o[1] - o[3]) >= ReacherEnv::kMinStartDistance);
      CHECK(o[4] == 0.0);
      CHECK(o[5] == 0.0);
    }
  }

  TEST_CASE("reacher capture ends the episode with the bonus") {
    ReacherEnv env;
    env.set_state({0.5, 0.5}, {0.5, 0.5});
    const auto r = env.step(std::vector<double>{0.0, 0.0});
    CHECK(r.done);
    CHECK_FALSE(r.truncated);
    CHECK(r.reward == doctest::Approx(1.0));
    CHECK_THROWS_AS(env.step(std::vector<double>{0.0, 0.0}), UsageError);
  }

  TEST_CASE("reacher dynamics and walls") {
    ReacherEnv env;
    env.set_state({0.2, 0.98}, {0.9, 0.1}, {0.0, 0.5});
    const auto r = env.step(std::vector<double>{1.0, 1.0});
    // v' = v + (f - v) dt
    CHECK(r.next_state[4] == doctest::Approx(0.1));
    CHECK(r.next_state[0] == doctest::Approx(0.21));
    // 0.98 + 0.55 * 0.1 leaves the box: clamped with the velocity zeroed
    CHECK(r.next_state[1] == 1.0);
    CHECK(r.next_state[5] == 0.0);
    CHECK(r.reward == doctest::Approx(-std::hypot(0.9 - 0.21, 0.1 - 1.0)));
  }

  TEST_CASE("reacher truncates at 200 steps when the goal is never reached") {
    ReacherEnv env;
    env.set_state({0.0, 0.0}, {1.0, 1.0});
    StepResult r;
    for (std::size_t t = 1; t <= 200; ++t) {
      r = env.step(std::vector<double>{-1.0, -1.0});
      CHECK(r.truncated == (t == 200));
      CHECK_FALSE(r.done);
    }
  }

  TEST_CASE("unknown environments are configuration errors") {
    CHECK_THROWS_AS(make_env("cartpole"), ConfigError);
  }

  TEST_CASE("reward transform validation") {
    CHECK_THROWS_AS((RewardTransform{0.0}).validate(), ConfigError);
    CHECK_THROWS_AS((RewardTransform{NAN}).validate(), ConfigError);
    CHECK_THROWS_AS((RewardTransform{1.0, -1.0}).validate(), ConfigError);
    CHECK_THROWS_AS(wrap_reward(make_env("pendulum"), RewardTransform{0.0}, 0), ConfigError);
  }

  TEST_CASE("reward wrapper: identity, scaling and untouched states") {
    for (double scale : {1.0, 10.0, -0.5}) {
      auto base = make_env("pendulum");
      auto wrapped = wrap_reward(make_env("pendulum"), RewardTransform{scale}, 3);
      CHECK(base->reset(8) == wrapped->reset(8));
      const auto acts = random_actions(200, 2.0, 6);
      for (double a : acts) {
        const auto rb = base->step(std::vector<double>{a});
        const auto rw = wrapped->step(std::vector<double>{a});
        CHECK(rw.next_state == rb.next_state);
        CHECK(rw.truncated == rb.truncated);
        CHECK(rw.reward == scale * rb.reward);
      }
    }
  }

  TEST_CASE("reward wrapper: sparsify zeroes rewards below the threshold before scaling") {
    auto base = make_env("pendulum");
    auto wrapped = wrap_reward(make_env("pendulum"), RewardTransform{2.0, 0.0, -1.0}, 0);
    base->reset(2);
    wrapped->reset(2);
    for (double a : random_actions(200, 2.0, 7)) {
      const double rb = base->step(std::vector<double>{a}).reward;
      const double rw = wrapped->step(std::vector<double>{a}).reward;
      CHECK(rw == (rb < -1.0 ? 0.0 : 2.0 * rb));
    }
  }

  TEST_CASE("reward wrapper: additive noise has the configured spread") {
    auto base = make_env("pendulum");
    auto wrapped = wrap_reward(make_env("pendulum"), RewardTransform{1.0, 5.0}, 11);
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (std::uint64_t ep = 0; n < 100000; ++ep) {
      base->reset(ep);
      wrapped->reset(ep);
      for (bool over = false; !over;) {
        const std::vector<double> a = {0.3};
        const auto rb = base->step(a);
        const auto rw = wrapped->step(a);
        const double d = rw.reward - rb.reward;
        sum += d;
        sq += d * d;
        ++n;
        over = rb.truncated || rb.done;
      }
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    CHECK(std::fabs(sd - 5.0) < 0.03 * 5.0);
    CHECK(std::fabs(mean) < 4 * 5.0 / std::sqrt(static_cast<double>(n)));
  }

  TEST_CASE("reward wrapper noise is reproducible per episode seed") {
    auto a = wrap_reward(make_env("reacher"), RewardTransform{1.0, 1.0}, 5);
    auto b = wrap_reward(make_env("reacher"), RewardTransform{1.0, 1.0}, 5);
    a->reset(1);
    a->step(std::vector<double>{0.1, 0.1});
    a->reset(3);
    b->reset(3);
    for (int t = 0; t < 20; ++t)
      CHECK(a->step(std::vector<double>{0.2, -0.1}).reward == b->step(std::vector<double>{0.2, -0.1}).reward);
  }

  TEST_CASE("registry factory wraps only non-identity transforms") {
    auto plain = env_factory("pendulum")();
    CHECK(dynamic_cast<PendulumEnv*>(plain.get()) != nullptr);
    auto wrapped = env_factory("pendulum", RewardTransform{10.0}, 1)();
    CHECK(dynamic_cast<RewardWrapper*>(wrapped.get()) != nullptr);
    CHECK(wrapped->reward_bound() == doctest::Approx(10.0 * plain->reward_bound()));
  }
}

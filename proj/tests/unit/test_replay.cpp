#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "tricritic/errors.hpp"
#include "tricritic/replay/replay_buffer.hpp"
#include "tricritic/rng.hpp"

using namespace tricritic;

namespace {

Transition tr(double id, std::size_t sd = 2, std::size_t ad = 1, double mask = 1.0) {
  return Transition{std::vector<double>(sd, id), std::vector<double>(ad, -id), id, std::vector<double>(sd, id + 0.5),
                    mask};
}

}  // namespace

TEST_SUITE("replay") {
  TEST_CASE("ring semantics") {
    ReplayBuffer b(2);
    b.push(tr(1));
    CHECK(b.size() == 1);
    b.push(tr(2));
    b.push(tr(3));
    CHECK(b.size() == 2);
    CHECK(b.at(0).reward == 2.0);
    CHECK(b.at(1).reward == 3.0);
  }

  TEST_CASE("overflow retains the last capacity items in order") {
    for (std::size_t cap : {1, 5, 7}) {
      for (std::size_t k : {0, 1, 3, 12}) {
        ReplayBuffer b(cap);
        const std::size_t total = cap + k;
        for (std::size_t i = 0; i < total; ++i) b.push(tr(static_cast<double>(i)));
        REQUIRE(b.size() == cap);
        for (std::size_t i = 0; i < cap; ++i) {
          const auto t = b.at(i);
          CHECK(t == tr(static_cast<double>(total - cap + i)));
        }
      }
    }
  }

  TEST_CASE("malformed transitions are refused") {
    ReplayBuffer b(4);
    CHECK_THROWS_AS(b.push(tr(1, 0)), UsageError);
    b.push(tr(1));
    CHECK_THROWS_AS(b.push(tr(2, 3)), UsageError);
    CHECK_THROWS_AS(b.push(tr(2, 2, 2)), UsageError);
    CHECK_THROWS_AS(b.push(tr(2, 2, 1, 0.5)), UsageError);
    CHECK(b.size() == 1);
    CHECK_THROWS_AS(ReplayBuffer(0), ConfigError);
  }

  TEST_CASE("sampling") {
    ReplayBuffer empty(3);
    Rng rng = make_rng(1);
    CHECK_THROWS_AS(empty.sample(2, rng), UsageError);

    ReplayBuffer one(3);
    one.push(tr(7, 2, 1, 0.0));
    const Batch batch = one.sample(4, rng);
    REQUIRE(batch.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(batch.transition(i) == tr(7, 2, 1, 0.0));

    ReplayBuffer b(50);
    for (int i = 0; i < 80; ++i) b.push(tr(i));
    Rng r1 = make_rng(9), r2 = make_rng(9);
    const Batch x = b.sample(32, r1), y = b.sample(32, r2);
    CHECK(x.rewards == y.rewards);
    CHECK(x.states == y.states);
    for (std::size_t i = 0; i < 32; ++i) {
      CHECK(x.rewards[i] >= 30.0);
      CHECK(x.states(i, 0) == x.rewards[i]);
      CHECK(x.actions(i, 0) == -x.rewards[i]);
      CHECK(x.next_states(i, 1) == x.rewards[i] + 0.5);
    }
  }

  TEST_CASE("sampled indices are uniform") {
    const std::size_t size = 1000, n = 1'000'000;
    ReplayBuffer b(size);
    for (std::size_t i = 0; i < size; ++i) b.push(tr(static_cast<double>(i), 1, 1));
    Rng rng = make_rng(123);
    std::vector<std::size_t> counts(size, 0);
    Batch batch;
    for (std::size_t drawn = 0; drawn < n; drawn += 1000) {
      b.sample(1000, rng, batch);
      for (double r : batch.rewards) ++counts[static_cast<std::size_t>(r)];
    }
    const double p = 1.0 / size;
    const double tol = 5.0 * std::sqrt(p * (1 - p) / n);
    std::size_t violations = 0;
    for (std::size_t c : counts) violations += std::fabs(static_cast<double>(c) / n - p) > tol;
    CHECK(violations == 0);
  }

  TEST_CASE("dump and load reproduce the buffer") {
    ReplayBuffer b(6);
    for (int i = 0; i < 9; ++i) b.push(tr(i, 3, 2, i % 4 == 0 ? 0.0 : 1.0));
    const auto path = std::filesystem::temp_directory_path() / "tricritic_replay_roundtrip.bin";
    b.dump(path);
    const ReplayBuffer c = ReplayBuffer::load(path, 6);
    REQUIRE(c.size() == b.size());
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(c.at(i) == b.at(i));
    Rng r1 = make_rng(4), r2 = make_rng(4);
    CHECK(b.sample(10, r1).rewards == c.sample(10, r2).rewards);
    std::filesystem::remove(path);
  }
}

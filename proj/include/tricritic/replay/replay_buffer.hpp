#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "tricritic/matrix.hpp"
#include "tricritic/rng.hpp"

namespace tricritic {

struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  // 0 when the episode terminated at this step, 1 otherwise (including truncation).
  double done_mask = 1.0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Mini-batch in structure-of-arrays form, one row per sampled transition.
struct Batch {
  Matrix states;
  Matrix actions;
  std::vector<double> rewards;
  Matrix next_states;
  std::vector<double> done_masks;

  std::size_t size() const { return rewards.size(); }
  Transition transition(std::size_t i) const;
};

Batch make_batch(const std::vector<Transition>& transitions);

// Fixed-capacity FIFO ring; uniform sampling with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  // Dimensions are fixed by the first transition; later mismatches throw UsageError.
  void push(const Transition& t);

  // n indices uniform over [0, size) with replacement. Throws UsageError when empty.
  void sample(std::size_t n, Rng& rng, Batch& out) const;
  Batch sample(std::size_t n, Rng& rng) const;

  // i = 0 is the oldest retained transition.
  Transition at(std::size_t i) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }

  // Flat binary dump, oldest first: magic "TRCRPL01", u64 state_dim, u64
  // action_dim, u64 count, then per transition f64 state, action, reward,
  // next_state, done_mask (little-endian).
  void dump(const std::filesystem::path& path) const;
  static ReplayBuffer load(const std::filesystem::path& path, std::size_t capacity);

 private:
  std::size_t physical(std::size_t logical) const;
  std::size_t stride() const { return 2 * state_dim_ + action_dim_ + 2; }

  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t write_index_ = 0;
  std::size_t state_dim_ = 0;
  std::size_t action_dim_ = 0;
  // Row layout: state | action | reward | next_state | done_mask.
  std::vector<double> storage_;
};

}  // namespace tricritic

#include "tricritic/replay/replay_buffer.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <stdexcept>
#include <string>

#include "tricritic/diffcore/checkpoint.hpp"
#include "tricritic/errors.hpp"

namespace tricritic {
namespace {
constexpr std::array<char, 8> kMagic = {'T', 'R', 'C', 'R', 'P', 'L', '0', '1'};
}

Transition Batch::transition(std::size_t i) const {
  const auto s = states.row(i);
  const auto a = actions.row(i);
  const auto n = next_states.row(i);
  return {{s.begin(), s.end()}, {a.begin(), a.end()}, rewards[i], {n.begin(), n.end()}, done_masks[i]};
}

Batch make_batch(const std::vector<Transition>& transitions) {
  Batch b;
  if (transitions.empty()) return b;
  const std::size_t n = transitions.size();
  const std::size_t sd = transitions.front().state.size();
  const std::size_t ad = transitions.front().action.size();
  b.states.resize(n, sd);
  b.actions.resize(n, ad);
  b.next_states.resize(n, sd);
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = transitions[i];
    if (t.state.size() != sd || t.next_state.size() != sd || t.action.size() != ad)
      throw ShapeError("transitions in a batch must share dimensions");
    std::copy(t.state.begin(), t.state.end(), b.states.row(i).begin());
    std::copy(t.action.begin(), t.action.end(), b.actions.row(i).begin());
    std::copy(t.next_state.begin(), t.next_state.end(), b.next_states.row(i).begin());
    b.rewards.push_back(t.reward);
    b.done_masks.push_back(t.done_mask);
  }
  return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw ConfigError("replay capacity must be >= 1");
}

void ReplayBuffer::push(const Transition& t) {
  if (size_ == 0 && storage_.empty()) {
    if (t.state.empty() || t.action.empty()) throw UsageError("transition with empty state or action");
    state_dim_ = t.state.size();
    action_dim_ = t.action.size();
  }
  if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ || t.action.size() != action_dim_)
    throw UsageError("transition dimensions differ from the first stored transition");
  if (t.done_mask != 0.0 && t.done_mask != 1.0) throw UsageError("done_mask must be 0 or 1");

  const std::size_t w = stride();
  if (storage_.size() < capacity_ * w && write_index_ * w == storage_.size()) storage_.resize(storage_.size() + w);
  double* row = storage_.data() + write_index_ * w;
  row = std::copy(t.state.begin(), t.state.end(), row);
  row = std::copy(t.action.begin(), t.action.end(), row);
  *row++ = t.reward;
  row = std::copy(t.next_state.begin(), t.next_state.end(), row);
  *row = t.done_mask;

  write_index_ = (write_index_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

std::size_t ReplayBuffer::physical(std::size_t logical) const {
  return size_ < capacity_ ? logical : (write_index_ + logical) % capacity_;
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay index " + std::to_string(i));
  const double* row = storage_.data() + physical(i) * stride();
  Transition t;
  t.state.assign(row, row + state_dim_);
  row += state_dim_;
  t.action.assign(row, row + action_dim_);
  row += action_dim_;
  t.reward = *row++;
  t.next_state.assign(row, row + state_dim_);
  row += state_dim_;
  t.done_mask = *row;
  return t;
}

void ReplayBuffer::sample(std::size_t n, Rng& rng, Batch& out) const {
  if (size_ == 0) throw UsageError("cannot sample from an empty replay buffer");
  out.states.resize(n, state_dim_);
  out.actions.resize(n, action_dim_);
  out.next_states.resize(n, state_dim_);
  out.rewards.resize(n);
  out.done_masks.resize(n);
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  const std::size_t w = stride();
  for (std::size_t i = 0; i < n; ++i) {
    // Logical index, so a reloaded dump samples the same transitions.
    const double* row = storage_.data() + physical(pick(rng)) * w;
    std::copy(row, row + state_dim_, out.states.row(i).begin());
    row += state_dim_;
    std::copy(row, row + action_dim_, out.actions.row(i).begin());
    row += action_dim_;
    out.rewards[i] = *row++;
    std::copy(row, row + state_dim_, out.next_states.row(i).begin());
    row += state_dim_;
    out.done_masks[i] = *row;
  }
}

Batch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  Batch b;
  sample(n, rng, b);
  return b;
}

void ReplayBuffer::dump(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(kMagic.data(), kMagic.size());
  checkpoint::write_u64(out, state_dim_);
  checkpoint::write_u64(out, action_dim_);
  checkpoint::write_u64(out, size_);
  const std::size_t w = stride();
  for (std::size_t i = 0; i < size_; ++i) {
    const double* row = storage_.data() + physical(i) * w;
    for (std::size_t j = 0; j < w; ++j) checkpoint::write_f64(out, row[j]);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ReplayBuffer ReplayBuffer::load(const std::filesystem::path& path, std::size_t capacity) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error(path.string() + " is not a replay dump");
  const auto sd = static_cast<std::size_t>(checkpoint::read_u64(in));
  const auto ad = static_cast<std::size_t>(checkpoint::read_u64(in));
  const auto count = static_cast<std::size_t>(checkpoint::read_u64(in));
  ReplayBuffer buffer(capacity);
  for (std::size_t i = 0; i < count; ++i) {
    Transition t;
    for (std::size_t j = 0; j < sd; ++j) t.state.push_back(checkpoint::read_f64(in));
    for (std::size_t j = 0; j < ad; ++j) t.action.push_back(checkpoint::read_f64(in));
    t.reward = checkpoint::read_f64(in);
    for (std::size_t j = 0; j < sd; ++j) t.next_state.push_back(checkpoint::read_f64(in));
    t.done_mask = checkpoint::read_f64(in);
    buffer.push(t);
  }
  return buffer;
}

}  // namespace tricritic

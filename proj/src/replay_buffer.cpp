#include "ecodrive/mpo/replay_buffer.hpp"

#include <cmath>
#include <stdexcept>

namespace ecodrive::mpo {

void Transition::validate() const {
  if (!state.allFinite() || !next_state.allFinite() || !std::isfinite(torque) || !std::isfinite(reward) ||
      !std::isfinite(behavior_logprob_torque)) {
    throw std::invalid_argument("Transition: non-finite field");
  }
  if (gear_index < 0 || gear_index > 2) throw std::invalid_argument("Transition: gear index outside {0,1,2}");
  if (!(behavior_prob_gear > 0 && behavior_prob_gear <= 1)) {
    throw std::invalid_argument("Transition: behavior gear probability outside (0, 1]");
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim) : capacity_(capacity), state_dim_(state_dim) {
  if (capacity == 0 || state_dim <= 0) throw std::invalid_argument("ReplayBuffer: capacity and state_dim must be positive");
}

void ReplayBuffer::set_window(int length) {
  if (length <= 0) throw std::invalid_argument("ReplayBuffer: window length must be positive");
  window_ = length;
  valid_ = 0;
  if (size_ >= static_cast<std::size_t>(window_)) {
    for (std::size_t i = 0; i + window_ <= size_; ++i) valid_ += window_valid(i) ? 1 : 0;
  }
}

void ReplayBuffer::begin_episode() {
  ++current_episode_;
  run_length_ = 0;
}

bool ReplayBuffer::window_valid(std::size_t logical) const {
  const std::size_t last = logical + window_ - 1;
  return last < size_ && episode_[physical(logical)] == episode_[physical(last)];
}

void ReplayBuffer::push(const Transition& t) {
  t.validate();
  if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_) {
    throw std::invalid_argument("ReplayBuffer: state dimension mismatch");
  }
  std::size_t slot;
  if (size_ == capacity_) {
    if (window_valid(0)) --valid_;
    slot = head_;
    head_ = (head_ + 1) % capacity_;
    --size_;
  } else {
    slot = (head_ + size_) % capacity_;
  }
  if (states_.size() < (slot + 1) * static_cast<std::size_t>(state_dim_)) {
    const std::size_t n = slot + 1;
    states_.resize(n * state_dim_);
    next_states_.resize(n * state_dim_);
    torque_.resize(n);
    gear_.resize(n);
    logp_.resize(n);
    pgear_.resize(n);
    reward_.resize(n);
    done_.resize(n);
    episode_.resize(n);
  }
  for (int i = 0; i < state_dim_; ++i) {
    states_[slot * state_dim_ + i] = t.state[i];
    next_states_[slot * state_dim_ + i] = t.next_state[i];
  }
  torque_[slot] = t.torque;
  gear_[slot] = t.gear_index;
  logp_[slot] = t.behavior_logprob_torque;
  pgear_[slot] = t.behavior_prob_gear;
  reward_[slot] = t.reward;
  done_[slot] = t.done ? 1 : 0;
  episode_[slot] = current_episode_;
  ++size_;
  // The oldest surviving steps of this episode may have been evicted.
  run_length_ = std::min(run_length_ + 1, size_);
  if (run_length_ >= static_cast<std::size_t>(window_)) ++valid_;
  if (t.done) begin_episode();
}

Transition ReplayBuffer::at(std::size_t logical) const {
  if (logical >= size_) throw std::out_of_range("ReplayBuffer::at");
  const std::size_t p = physical(logical);
  Transition t;
  t.state = Eigen::Map<const Eigen::VectorXd>(states_.data() + p * state_dim_, state_dim_);
  t.next_state = Eigen::Map<const Eigen::VectorXd>(next_states_.data() + p * state_dim_, state_dim_);
  t.torque = torque_[p];
  t.gear_index = gear_[p];
  t.behavior_logprob_torque = logp_[p];
  t.behavior_prob_gear = pgear_[p];
  t.reward = reward_[p];
  t.done = done_[p] != 0;
  return t;
}

std::optional<std::vector<std::size_t>> ReplayBuffer::sample_starts(std::size_t count, std::mt19937_64& rng) const {
  if (!ready()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, size_ - window_);
  std::vector<std::size_t> starts;
  starts.reserve(count);
  while (starts.size() < count) {
    const std::size_t s = pick(rng);
    if (window_valid(s)) starts.push_back(s);
  }
  return starts;
}

std::optional<std::vector<Segment>> ReplayBuffer::sample_segments(std::size_t count, std::mt19937_64& rng) const {
  auto starts = sample_starts(count, rng);
  if (!starts) return std::nullopt;
  std::vector<Segment> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k].steps.reserve(window_);
    for (int i = 0; i < window_; ++i) out[k].steps.push_back(at((*starts)[k] + i));
  }
  return out;
}

}  // namespace ecodrive::mpo

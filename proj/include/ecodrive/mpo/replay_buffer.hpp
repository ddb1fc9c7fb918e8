#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace ecodrive::mpo {

/// Torque log-density recorded for a deterministic behaviour action; any
/// stochastic target policy then has importance ratio 0 and the trace is cut.
inline constexpr double kPointMassLogProb = 1e6;

/// One stored step. `torque` is in normalized policy units and `gear_index`
/// in {0, 1, 2}; behavior probabilities are those of the acting policy.
struct Transition {
  Eigen::VectorXd state;
  double torque = 0.0;
  int gear_index = 1;
  double behavior_logprob_torque = 0.0;
  double behavior_prob_gear = 1.0;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;

  void validate() const;
};

/// Contiguous run of transitions from one episode, oldest first.
struct Segment {
  std::vector<Transition> steps;
};

/// FIFO ring of transitions tagged by episode. Samples fixed-length windows
/// uniformly over all start positions whose window stays inside one episode.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int state_dim);

  /// Starts a new episode; later pushes belong to it.
  void begin_episode();
  void push(const Transition& t);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  int state_dim() const { return state_dim_; }

  /// Number of start positions with a full `length` window in one episode.
  /// Only meaningful for the window length configured by set_window().
  std::size_t valid_windows() const { return valid_; }
  void set_window(int length);
  int window() const { return window_; }

  bool ready() const { return valid_ > 0; }

  /// Logical start indices (0 = oldest) of `count` windows, or nullopt when
  /// no window fits.
  std::optional<std::vector<std::size_t>> sample_starts(std::size_t count, std::mt19937_64& rng) const;
  std::optional<std::vector<Segment>> sample_segments(std::size_t count, std::mt19937_64& rng) const;

  Transition at(std::size_t logical) const;
  std::uint64_t episode_at(std::size_t logical) const { return episode_[physical(logical)]; }

 private:
  std::size_t physical(std::size_t logical) const { return (head_ + logical) % capacity_; }
  bool window_valid(std::size_t logical) const;

  std::size_t capacity_;
  int state_dim_;
  int window_ = 1;
  std::size_t head_ = 0;  // physical index of the oldest entry
  std::size_t size_ = 0;
  std::size_t valid_ = 0;
  std::uint64_t current_episode_ = 0;
  std::size_t run_length_ = 0;  // steps of the current episode still stored

  std::vector<double> states_;
  std::vector<double> next_states_;
  std::vector<double> torque_;
  std::vector<int> gear_;
  std::vector<double> logp_;
  std::vector<double> pgear_;
  std::vector<double> reward_;
  std::vector<char> done_;
  std::vector<std::uint64_t> episode_;
};

}  // namespace ecodrive::mpo

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "coex/counting/simhash.hpp"
#include "coex/envs/env.hpp"

namespace coex::marl {

/// One environment step. Hashed keys are stored so replay looks counts up
/// fresh at update time instead of freezing bonuses at collection.
struct Transition {
  std::vector<std::vector<double>> obs;
  std::vector<double> state;
  counting::HashKey key = 0;
  envs::JointAction action;        // indexed by agent identity
  std::vector<int> order;          // computation order, position -> agent id
  double reward = 0.0;             // standardized at collection when enabled
  std::vector<std::vector<double>> next_obs;
  std::vector<double> next_state;
  counting::HashKey next_key = 0;
  bool done = false;
};

/// Fixed-capacity ring buffer with uniform sampling over the filled region.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return storage_[i]; }

  std::vector<std::size_t> sample_indices(std::size_t batch, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t write_ = 0;
  std::vector<Transition> storage_;
};

/// Online reward scale estimate. Rewards are divided by the running standard
/// deviation; the mean is not subtracted so sparse-task reward signs survive.
class RewardStats {
 public:
  void observe(double r);
  double stddev() const;  // clamped at >= 1e-6
  /// observe(r), then r / stddev().
  double standardize(double r);
  std::uint64_t count() const { return n_; }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace coex::marl

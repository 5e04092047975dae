#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace coex::envs {

/// Per-agent discrete action indices, one per agent.
using JointAction = std::vector<int>;

struct EnvState {
  std::vector<double> state;               // raw global state s
  std::vector<std::vector<double>> obs;    // per-agent observations
  int t = 0;
};

struct StepResult {
  double reward = 0.0;  // shared global reward
  EnvState next;
  bool done = false;
};

/// Dec-POMDP environment driven by one training run. reset(seed) seeds all
/// randomness and samples the task instance; begin_episode() starts a fresh
/// episode without resampling it (the hidden optimal action of the repeated
/// game persists; the foraging board is re-placed).
class Env {
 public:
  virtual ~Env() = default;

  virtual EnvState reset(std::uint64_t seed) = 0;
  virtual EnvState begin_episode() = 0;
  virtual StepResult step(const JointAction& a) = 0;

  /// Per-agent action counts; constant per instance.
  virtual std::vector<int> action_space() const = 0;
  virtual std::vector<double> global_state() const = 0;
  virtual std::size_t num_agents() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t obs_dim() const = 0;

  /// Copy of this environment including the sampled task instance; reseed()
  /// then isolates the copy's episode-level randomness (used for greedy
  /// evaluation without disturbing the training stream).
  virtual std::unique_ptr<Env> clone() const = 0;
  virtual void reseed(std::uint64_t seed) = 0;
};

}  // namespace coex::envs

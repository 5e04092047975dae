#pragma once

#include <random>

#include "coex/envs/env.hpp"

namespace coex::envs {

struct ForagingConfig {
  int width = 10;
  int height = 10;
  int n_agents = 3;
  int n_foods = 3;
  int max_agent_level = 2;
  int episode_limit = 25;
};

/// Sparse level-based foraging gridworld. Agents and foods carry levels; a
/// food is collected when the agents simultaneously loading next to it have
/// a level sum at least the food's level. Reward on collection is the food
/// level over the episode's total food level, so returns live in [0,1].
/// Actions: 0 noop, 1 up, 2 down, 3 left, 4 right, 5 load.
class ForagingEnv final : public Env {
 public:
  static constexpr int kActions = 6;

  explicit ForagingEnv(ForagingConfig cfg);

  EnvState reset(std::uint64_t seed) override;
  EnvState begin_episode() override;
  StepResult step(const JointAction& a) override;

  std::vector<int> action_space() const override;
  std::vector<double> global_state() const override;
  std::size_t num_agents() const override { return static_cast<std::size_t>(cfg_.n_agents); }
  std::size_t state_dim() const override;
  std::size_t obs_dim() const override { return state_dim(); }

  std::unique_ptr<Env> clone() const override;
  void reseed(std::uint64_t seed) override;

  const ForagingConfig& config() const { return cfg_; }
  /// Fraction of this episode's food level already collected; 1 iff all.
  double collected_fraction() const;

  struct Agent {
    int x = 0, y = 0, level = 1;
  };
  struct Food {
    int x = 0, y = 0, level = 1;
    bool present = false;
  };
  const std::vector<Agent>& agents() const { return agents_; }
  const std::vector<Food>& foods() const { return foods_; }

 private:
  EnvState make_state() const;
  bool occupied(int x, int y) const;
  bool all_collected() const;

  ForagingConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<Agent> agents_;
  std::vector<Food> foods_;
  int total_food_level_ = 1;
  int t_ = 0;
};

}  // namespace coex::envs

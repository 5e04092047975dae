#pragma once

#include <random>

#include "coex/envs/env.hpp"

namespace coex::envs {

/// Repeated cooperative Bernoulli game: one hidden joint action out of k^n
/// pays off with probability 0.9, every other with probability p0. Episodes
/// have length 1, so episodic return and bandit regret coincide.
class BernoulliGame final : public Env {
 public:
  static constexpr double kOptimalPayoff = 0.9;

  BernoulliGame(std::size_t n_agents, int n_actions, double suboptimality);

  EnvState reset(std::uint64_t seed) override;
  EnvState begin_episode() override;
  StepResult step(const JointAction& a) override;

  std::vector<int> action_space() const override;
  std::vector<double> global_state() const override { return {1.0}; }
  std::size_t num_agents() const override { return n_; }
  std::size_t state_dim() const override { return 1; }
  std::size_t obs_dim() const override { return 1; }

  std::unique_ptr<Env> clone() const override;
  void reseed(std::uint64_t seed) override;

  const JointAction& optimal_action() const { return optimal_; }
  double expected_payoff(const JointAction& a) const;
  double suboptimality() const { return p0_; }

 private:
  EnvState make_state() const;

  std::size_t n_;
  int k_;
  double p0_;
  JointAction optimal_;
  std::mt19937_64 rng_;
};

}  // namespace coex::envs

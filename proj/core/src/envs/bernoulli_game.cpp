#include "coex/envs/bernoulli_game.hpp"

#include "coex/util/errors.hpp"
#include "coex/util/rng.hpp"

namespace coex::envs {

BernoulliGame::BernoulliGame(std::size_t n_agents, int n_actions, double suboptimality)
    : n_(n_agents), k_(n_actions), p0_(suboptimality) {
  if (n_ == 0 || k_ <= 0) throw ConfigError("game needs agents and actions");
  if (p0_ < 0.0 || p0_ >= kOptimalPayoff) {
    throw ConfigError("suboptimality must be in [0, 0.9)");
  }
}

EnvState BernoulliGame::make_state() const {
  EnvState s;
  s.state = global_state();
  s.obs.assign(n_, {1.0});
  s.t = 0;
  return s;
}

EnvState BernoulliGame::reset(std::uint64_t seed) {
  rng_ = make_rng(seed, Stream::env);
  std::uniform_int_distribution<int> dist(0, k_ - 1);
  optimal_.resize(n_);
  for (auto& a : optimal_) a = dist(rng_);
  return make_state();
}

EnvState BernoulliGame::begin_episode() { return make_state(); }

StepResult BernoulliGame::step(const JointAction& a) {
  if (a.size() != n_) throw ConfigError("joint action length mismatch");
  for (int ai : a) {
    if (ai < 0 || ai >= k_) throw ConfigError("action index out of range");
  }
  const double p = expected_payoff(a);
  std::bernoulli_distribution payoff(p);
  StepResult out;
  out.reward = payoff(rng_) ? 1.0 : 0.0;
  out.done = true;  // repeated game: every step is an episode
  out.next = make_state();
  return out;
}

std::vector<int> BernoulliGame::action_space() const {
  return std::vector<int>(n_, k_);
}

std::unique_ptr<Env> BernoulliGame::clone() const {
  return std::make_unique<BernoulliGame>(*this);
}

void BernoulliGame::reseed(std::uint64_t seed) { rng_ = make_rng(seed, Stream::env); }

double BernoulliGame::expected_payoff(const JointAction& a) const {
  return a == optimal_ ? kOptimalPayoff : p0_;
}

}  // namespace coex::envs

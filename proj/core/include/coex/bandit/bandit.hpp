#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coex/envs/bernoulli_game.hpp"

namespace coex::bandit {

/// Tabular learner variants for the didactic game. Naming follows what each
/// part of the estimate conditions on: payoff means (Rew) and optimism
/// bonuses (Opt) are either dependent on predecessors' actions or
/// independent; UCBCen treats the whole joint action space as one arm set.
enum class Variant {
  dep_rew_dep_opt,
  ind_rew_dep_opt,
  ind_rew_ind_opt,
  ucb_cen,
};

Variant parse_variant(const std::string& name);
std::string to_string(Variant v);

/// Tabular estimates and the selection rule for one variant. Counts and
/// means are dense over the prefix tree where the variant needs them; the
/// game sizes here stay desk-scale (k^n bounded at construction).
class Learner {
 public:
  Learner(Variant variant, std::size_t n_agents, int n_actions, double c);

  /// Chooses a joint action; unvisited entries first, ties to lowest index.
  envs::JointAction select(std::uint64_t t) const;
  /// Incremental-mean update of every table entry on the path of `a`.
  void update(const envs::JointAction& a, double payoff);

  // Inspection (tests and diagnostics).
  std::uint64_t prefix_count(const envs::JointAction& prefix) const;
  double prefix_mean(const envs::JointAction& prefix) const;
  std::uint64_t agent_count(std::size_t agent, int action) const;
  double agent_mean(std::size_t agent, int action) const;
  std::uint64_t total_plays() const { return total_; }
  /// Shifts every stored payoff mean; selection must be invariant to this.
  void add_to_all_means(double delta);

  Variant variant() const { return variant_; }

 private:
  std::size_t tree_index(const envs::JointAction& prefix) const;

  Variant variant_;
  std::size_t n_;
  int k_;
  double c_;
  std::uint64_t total_ = 0;
  // prefix tree, level l has k^l entries (dep variants)
  std::vector<std::vector<double>> tree_x_;
  std::vector<std::vector<std::uint64_t>> tree_n_;
  // per-agent tables (ind variants)
  std::vector<double> agent_x_;
  std::vector<std::uint64_t> agent_n_;
  // flat joint arms (ucb_cen)
  std::vector<double> cen_x_;
  std::vector<std::uint64_t> cen_n_;
};

struct GameSpec {
  std::size_t n_agents = 8;
  int n_actions = 3;
  double suboptimality = 0.0;
  std::uint64_t horizon = 30000;
  std::size_t n_seeds = 50;
  double c = 1.0;
  std::size_t window = 100;  // trailing window for the optimal-selection rate
  std::uint64_t seed_base = 0;
};

/// Cross-seed aggregates, one entry per step: mean and standard error of
/// cumulative expected regret and of the optimal-selection rate (trailing
/// window and cumulative).
struct RegretTrace {
  std::vector<double> mean_cum_regret, se_cum_regret;
  std::vector<double> mean_opt_window, se_opt_window;
  std::vector<double> mean_opt_cum, se_opt_cum;
  std::vector<double> final_cum_regret;  // per seed
  std::vector<double> final_opt_window;  // per seed
  std::size_t n_seeds = 0;
};

/// Runs the didactic game for one variant over seeds (seed_base + i).
/// Seeds are independent and run in parallel; aggregation is sequential in
/// seed order, so results do not depend on thread timing.
RegretTrace run_game(Variant variant, const GameSpec& spec, std::size_t n_threads = 0);

/// CSV columns: step, mean_cum_regret, se_cum_regret, mean_opt_rate,
/// se_opt_rate, mean_opt_rate_cum, se_opt_rate_cum.
void write_regret_csv(const std::string& path, const RegretTrace& trace);

}  // namespace coex::bandit

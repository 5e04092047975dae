#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>

#include "coex/counting/count_store.hpp"
#include "coex/envs/env.hpp"
#include "coex/envs/trace.hpp"
#include "coex/marl/config.hpp"
#include "coex/marl/networks.hpp"
#include "coex/marl/replay.hpp"

namespace coex::marl {

/// Sequential conditional argmax. Position p asks qfn for agent scores given
/// the already-chosen prefix and bonusfn for the optimism term; ties resolve
/// to the lowest action index.
envs::JointAction sequential_select(
    std::size_t n, int k,
    const std::function<std::vector<double>(std::size_t, const envs::JointAction&)>& qfn,
    const std::function<double(std::size_t, const envs::JointAction&, int)>& bonusfn);

/// (reward + rew_bonus) + gamma * (1 - done) * next_value.
inline double optimistic_target(double reward, double rew_bonus, double gamma, bool done,
                                double next_value) {
  return (reward + rew_bonus) + gamma * (done ? 0.0 : 1.0) * next_value;
}

struct StepLoss {
  double total = 0.0;
  double dep = std::numeric_limits<double>::quiet_NaN();
  double idp = std::numeric_limits<double>::quiet_NaN();
};

struct MetricsRow {
  std::uint64_t step = 0;
  double eval_mean_return = 0.0;
  double eval_std_return = 0.0;
  double train_loss = 0.0;
  double epsilon = 0.0;
  std::size_t buffer_size = 0;
  std::size_t distinct_count_keys = 0;
};

struct EvalResult {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Greedy rollout helper shared by evaluation and tests.
EvalResult run_greedy_episodes(
    envs::Env& env, std::size_t episodes,
    const std::function<envs::JointAction(const envs::EnvState&)>& policy);

/// One seeded training run: count-conditioned optimistic action selection on
/// top of value decomposition, optimistic TD targets, and the ablation
/// variants. Strictly single-threaded and deterministic given (seed, config).
class Trainer {
 public:
  Trainer(std::unique_ptr<envs::Env> env, COEConfig cfg, std::uint64_t seed);

  /// One environment interaction: select, step, count, store.
  void collect_step(envs::TraceWriter* trace = nullptr);
  /// One gradient update; skips (nullopt) while the buffer lacks a batch.
  std::optional<StepLoss> train_step();

  /// Full loop with periodic greedy evaluation (bonuses removed, epsilon 0).
  void run(std::uint64_t total_steps, std::uint64_t eval_interval, std::size_t eval_episodes,
           const std::function<void(const MetricsRow&)>& sink,
           envs::TraceWriter* trace = nullptr);

  EvalResult evaluate(std::size_t episodes, std::uint64_t eval_seed) const;

  // Exposed steps (tests drive these directly).
  envs::JointAction select_actions(const std::vector<std::vector<double>>& obs,
                                   counting::HashKey key);
  /// Sequential per-agent maximization of Q + sqrt bonus at the next state;
  /// returns the chosen joint action (identity order) and per-agent
  /// optimistic values (indexed by agent identity). An empty order means the
  /// identity computation order.
  std::pair<envs::JointAction, std::vector<double>> greedy_joint_with_bonus(
      const nd::ParamSet& params, bool dependent, const std::vector<std::vector<double>>& obs,
      counting::HashKey key, const std::vector<int>& order = {}) const;
  std::vector<double> td_targets(const std::vector<std::size_t>& batch) const;
  envs::JointAction greedy_actions(const std::vector<std::vector<double>>& obs) const;
  /// Joint value of a specific action under the online parameters.
  double q_joint(const std::vector<std::vector<double>>& obs, const std::vector<double>& state,
                 const envs::JointAction& action) const;

  const nd::ParamSet& online_params() const { return online_; }
  const nd::ParamSet& target_params() const { return target_; }
  const counting::CountStore& counts() const { return counts_; }
  counting::CountStore& mutable_counts() { return counts_; }
  const ReplayBuffer& replay() const { return buffer_; }
  const envs::Env& env() const { return *env_; }
  const AgentNet& agent_net() const { return net_; }
  const Mixer& mixer() const { return mixer_; }
  const COEConfig& config() const { return cfg_; }
  std::uint64_t env_steps() const { return env_steps_; }
  double epsilon_now() const;
  const std::vector<std::size_t>& last_batch_indices() const { return last_batch_; }
  const RewardStats& reward_stats() const { return reward_stats_; }
  counting::HashKey current_key() const { return cur_key_; }
  const envs::EnvState& current_state() const { return cur_state_; }
  const std::vector<int>& current_order() const { return order_; }

 private:
  StepLoss train_plain(const std::vector<std::size_t>& batch);
  StepLoss train_cond_iq(const std::vector<std::size_t>& batch);
  StepLoss train_cond_cq(const std::vector<std::size_t>& batch);
  void apply_grads(nd::GradMap grads, double loss);
  std::vector<double> q_row(const nd::ParamSet& ps, std::span<const double> obs,
                            std::size_t agent, bool dependent,
                            const envs::JointAction& prefix) const;
  double boot_bonus(counting::HashKey key, const envs::JointAction& prefix, int action,
                    std::size_t agent) const;
  nd::Tensor batch_q_inputs(const std::vector<std::size_t>& batch, std::size_t agent,
                            bool next) const;
  nd::Tensor batch_states(const std::vector<std::size_t>& batch, bool next) const;
  void new_episode_order();
  /// Actions of the agents preceding `agent` in the transition's order.
  std::vector<int> predecessor_actions(const Transition& tr, std::size_t agent) const;

  std::unique_ptr<envs::Env> env_;
  COEConfig cfg_;
  std::uint64_t seed_;
  std::size_t n_;
  int k_;
  AgentNet net_;
  Mixer mixer_;
  nd::ParamSet online_;
  nd::ParamSet target_;
  std::unique_ptr<counting::StateHasher> hasher_;
  counting::CountStore counts_;
  std::vector<counting::CountStore> local_counts_;  // ucb_ind: per-agent stores
  ReplayBuffer buffer_;
  RewardStats reward_stats_;
  std::mt19937_64 actions_rng_;
  std::mt19937_64 replay_rng_;
  envs::EnvState cur_state_;
  counting::HashKey cur_key_ = 0;
  std::uint64_t env_steps_ = 0;
  std::vector<std::size_t> last_batch_;
  std::vector<int> order_;  // current episode's computation order
};

}  // namespace coex::marl

#include "coex/marl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "coex/util/errors.hpp"
#include "coex/util/rng.hpp"

namespace coex::marl {

using counting::sqrt_bonus;
using counting::ucb_bonus;

envs::JointAction sequential_select(
    std::size_t n, int k,
    const std::function<std::vector<double>(std::size_t, const envs::JointAction&)>& qfn,
    const std::function<double(std::size_t, const envs::JointAction&, int)>& bonusfn) {
  envs::JointAction chosen;
  chosen.reserve(n);
  for (std::size_t p = 0; p < n; ++p) {
    const std::vector<double> q = qfn(p, chosen);
    double best = -std::numeric_limits<double>::infinity();
    int best_a = 0;
    for (int a = 0; a < k; ++a) {
      const double v = q[a] + bonusfn(p, chosen, a);
      if (v > best) {
        best = v;
        best_a = a;
      }
    }
    chosen.push_back(best_a);
  }
  return chosen;
}

EvalResult run_greedy_episodes(
    envs::Env& env, std::size_t episodes,
    const std::function<envs::JointAction(const envs::EnvState&)>& policy) {
  std::vector<double> returns;
  returns.reserve(episodes);
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    envs::EnvState st = env.begin_episode();
    double ret = 0.0;
    for (;;) {
      envs::StepResult sr = env.step(policy(st));
      ret += sr.reward;
      if (sr.done) break;
      st = std::move(sr.next);
    }
    returns.push_back(ret);
  }
  EvalResult out;
  for (double r : returns) out.mean += r;
  out.mean /= static_cast<double>(returns.size());
  double sq = 0.0;
  for (double r : returns) sq += (r - out.mean) * (r - out.mean);
  out.stddev = std::sqrt(sq / static_cast<double>(returns.size()));
  return out;
}

namespace {

std::vector<int> identity_order(std::size_t n) {
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  return order;
}

int homogeneous_actions(const envs::Env& env) {
  const std::vector<int> space = env.action_space();
  for (int k : space) {
    if (k != space[0]) {
      throw ConfigError("shared-parameter agents need a homogeneous action space");
    }
  }
  return space[0];
}

}  // namespace

Trainer::Trainer(std::unique_ptr<envs::Env> env, COEConfig cfg, std::uint64_t seed)
    : env_(std::move(env)),
      cfg_(cfg),
      seed_(seed),
      n_(env_->num_agents()),
      k_(homogeneous_actions(*env_)),
      net_(env_->obs_dim(), n_, k_, cfg.hidden_dim,
           cfg.variant == Variant::cond_iq || cfg.variant == Variant::cond_cq),
      mixer_(cfg.mixer, n_, env_->state_dim(), cfg.mixer_embed_dim),
      counts_(n_, static_cast<std::size_t>(k_)),
      buffer_(cfg.buffer_capacity),
      actions_rng_(make_rng(seed, Stream::actions)),
      replay_rng_(make_rng(seed, Stream::replay)) {
  cfg_.validate();
  if (cfg_.variant == Variant::ucb_cen) {
    // centralized ablation: optimism enters through the reward bonus only
    cfg_.c_act = 0.0;
    cfg_.c_boot = 0.0;
  }
  auto init_rng = make_rng(seed, Stream::init);
  net_.init(online_, init_rng);
  mixer_.init(online_, init_rng);
  target_ = online_.clone_values();
  hasher_ =
      counting::make_hasher(cfg_.exact_counting, cfg_.feature_bits, env_->state_dim(), seed);
  if (cfg_.variant == Variant::ucb_ind) {
    for (std::size_t i = 0; i < n_; ++i) {
      local_counts_.emplace_back(1, static_cast<std::size_t>(k_));
    }
  }
  cur_state_ = env_->reset(seed);
  cur_key_ = hasher_->project(cur_state_.state);
  order_ = identity_order(n_);
  new_episode_order();
}

void Trainer::new_episode_order() {
  if (!cfg_.permute_order) return;
  order_ = identity_order(n_);
  // Fisher-Yates from the action stream
  for (std::size_t i = n_; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> dist(0, i - 1);
    std::swap(order_[i - 1], order_[dist(actions_rng_)]);
  }
}

double Trainer::epsilon_now() const {
  return cfg_.variant == Variant::eps_greedy ? cfg_.epsilon.at(env_steps_) : 0.0;
}

std::vector<double> Trainer::q_row(const nd::ParamSet& ps, std::span<const double> obs,
                                   std::size_t agent, bool dependent,
                                   const envs::JointAction& prefix) const {
  std::vector<double> q = net_.q_values(ps, obs, agent);
  if (dependent) {
    const std::vector<double> corr = net_.correction(ps, obs, agent, prefix);
    for (int a = 0; a < k_; ++a) q[a] += corr[a];
  }
  return q;
}

double Trainer::boot_bonus(counting::HashKey key, const envs::JointAction& prefix, int action,
                           std::size_t agent) const {
  if (cfg_.c_boot == 0.0) return 0.0;
  if (cfg_.variant == Variant::ucb_ind) {
    const int a[1] = {action};
    return sqrt_bonus(cfg_.c_boot, local_counts_[agent].count(key, a));
  }
  envs::JointAction ext = prefix;
  ext.push_back(action);
  return sqrt_bonus(cfg_.c_boot, counts_.count(key, ext));
}

envs::JointAction Trainer::select_actions(const std::vector<std::vector<double>>& obs,
                                          counting::HashKey key) {
  const bool dependent = cfg_.variant == Variant::cond_iq || cfg_.variant == Variant::cond_cq;

  if (cfg_.variant == Variant::eps_greedy) {
    const double eps = cfg_.epsilon.at(env_steps_);
    envs::JointAction a(n_, 0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> uniform_action(0, k_ - 1);
    for (std::size_t i = 0; i < n_; ++i) {
      if (eps > 0.0 && coin(actions_rng_) < eps) {
        a[i] = uniform_action(actions_rng_);
      } else {
        const std::vector<double> q = net_.q_values(online_, obs[i], i);
        a[i] = static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
      }
    }
    return a;
  }

  // sequential conditional selection in the episode's computation order;
  // prefixes (and count-store packing) follow computation positions
  auto qfn = [&](std::size_t p, const envs::JointAction& prefix) {
    const std::size_t agent = static_cast<std::size_t>(order_[p]);
    return q_row(online_, obs[agent], agent, dependent, prefix);
  };
  auto bonusfn = [&](std::size_t p, const envs::JointAction& prefix, int a) -> double {
    if (cfg_.c_act == 0.0) return 0.0;
    const std::size_t agent = static_cast<std::size_t>(order_[p]);
    if (cfg_.variant == Variant::ucb_ind) {
      const int child[1] = {a};
      return ucb_bonus(cfg_.c_act, local_counts_[agent].count(key, {}),
                       local_counts_[agent].count(key, child));
    }
    envs::JointAction ext = prefix;
    ext.push_back(a);
    return ucb_bonus(cfg_.c_act, counts_.count(key, prefix), counts_.count(key, ext));
  };
  const envs::JointAction by_position = sequential_select(n_, k_, qfn, bonusfn);
  envs::JointAction by_agent(n_, 0);
  for (std::size_t p = 0; p < n_; ++p) {
    by_agent[static_cast<std::size_t>(order_[p])] = by_position[p];
  }
  return by_agent;
}

std::pair<envs::JointAction, std::vector<double>> Trainer::greedy_joint_with_bonus(
    const nd::ParamSet& params, bool dependent, const std::vector<std::vector<double>>& obs,
    counting::HashKey key, const std::vector<int>& order) const {
  const std::vector<int> ord = order.empty() ? identity_order(n_) : order;
  envs::JointAction prefix;  // by position
  prefix.reserve(n_);
  envs::JointAction by_agent(n_, 0);
  std::vector<double> vals(n_, 0.0);
  for (std::size_t p = 0; p < n_; ++p) {
    const std::size_t agent = static_cast<std::size_t>(ord[p]);
    const std::vector<double> q = q_row(params, obs[agent], agent, dependent, prefix);
    double best = -std::numeric_limits<double>::infinity();
    int best_a = 0;
    for (int a = 0; a < k_; ++a) {
      const double v = q[a] + boot_bonus(key, prefix, a, agent);
      if (v > best) {
        best = v;
        best_a = a;
      }
    }
    vals[agent] = best;
    by_agent[agent] = best_a;
    prefix.push_back(best_a);
  }
  return {by_agent, vals};
}

envs::JointAction Trainer::greedy_actions(const std::vector<std::vector<double>>& obs) const {
  envs::JointAction a(n_, 0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::vector<double> q = net_.q_values(online_, obs[i], i);
    a[i] = static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
  }
  return a;
}

double Trainer::q_joint(const std::vector<std::vector<double>>& obs,
                        const std::vector<double>& state,
                        const envs::JointAction& action) const {
  std::vector<double> qs(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    qs[i] = net_.q_values(online_, obs[i], i)[static_cast<std::size_t>(action[i])];
  }
  return mixer_.forward(online_, qs, state);
}

void Trainer::collect_step(envs::TraceWriter* trace) {
  const envs::JointAction a = select_actions(cur_state_.obs, cur_key_);
  envs::StepResult sr = env_->step(a);

  // count in computation-position packing (identity order by default)
  envs::JointAction by_position(n_);
  for (std::size_t p = 0; p < n_; ++p) {
    by_position[p] = a[static_cast<std::size_t>(order_[p])];
  }
  counts_.increment(cur_key_, by_position);
  if (cfg_.variant == Variant::ucb_ind) {
    for (std::size_t i = 0; i < n_; ++i) {
      const int ai[1] = {a[i]};
      local_counts_[i].increment(cur_key_, ai);
    }
  }
  const double stored_reward =
      cfg_.standardize_rewards ? reward_stats_.standardize(sr.reward) : sr.reward;
  if (trace) trace->record(cur_state_.t, cur_state_.state, a, sr.reward, sr.done);

  Transition tr;
  tr.obs = cur_state_.obs;
  tr.state = cur_state_.state;
  tr.key = cur_key_;
  tr.action = a;
  tr.order = order_;
  tr.reward = stored_reward;
  tr.next_obs = sr.next.obs;
  tr.next_state = sr.next.state;
  tr.next_key = hasher_->project(sr.next.state);
  tr.done = sr.done;
  buffer_.push(std::move(tr));

  env_steps_ += 1;
  if (sr.done) {
    cur_state_ = env_->begin_episode();
    new_episode_order();
  } else {
    cur_state_ = std::move(sr.next);
  }
  cur_key_ = hasher_->project(cur_state_.state);
}

nd::Tensor Trainer::batch_q_inputs(const std::vector<std::size_t>& batch, std::size_t agent,
                                   bool next) const {
  const std::size_t in = net_.q_input_dim();
  nd::Tensor x({batch.size(), in});
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Transition& tr = buffer_[batch[b]];
    net_.write_q_input(next ? tr.next_obs[agent] : tr.obs[agent], agent, x.data() + b * in);
  }
  return x;
}

nd::Tensor Trainer::batch_states(const std::vector<std::size_t>& batch, bool next) const {
  const std::size_t ds = env_->state_dim();
  nd::Tensor x({batch.size(), ds});
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Transition& tr = buffer_[batch[b]];
    const std::vector<double>& s = next ? tr.next_state : tr.state;
    std::memcpy(x.data() + b * ds, s.data(), ds * sizeof(double));
  }
  return x;
}

std::vector<int> Trainer::predecessor_actions(const Transition& tr, std::size_t agent) const {
  std::vector<int> prefix;
  for (std::size_t p = 0; p < n_; ++p) {
    const std::size_t who = static_cast<std::size_t>(tr.order[p]);
    if (who == agent) break;
    prefix.push_back(tr.action[who]);
  }
  return prefix;
}

std::vector<double> Trainer::td_targets(const std::vector<std::size_t>& batch) const {
  // batched target-net forward per agent, then per-row sequential max
  std::vector<nd::Tensor> next_q(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    next_q[i] = net_.q_mlp().forward(target_, batch_q_inputs(batch, i, /*next=*/true));
  }
  std::vector<double> out(batch.size());
  std::vector<double> vals(n_);
  envs::JointAction prefix;
  envs::JointAction by_position(n_);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Transition& tr = buffer_[batch[b]];
    prefix.clear();
    for (std::size_t p = 0; p < n_; ++p) {
      const std::size_t agent = static_cast<std::size_t>(tr.order[p]);
      double best = -std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (int a = 0; a < k_; ++a) {
        const double v =
            next_q[agent].at(b, static_cast<std::size_t>(a)) +
            boot_bonus(tr.next_key, prefix, a, agent);
        if (v > best) {
          best = v;
          best_a = a;
        }
      }
      vals[agent] = best;
      prefix.push_back(best_a);
    }
    const double mixed = mixer_.forward(target_, vals, tr.next_state);
    for (std::size_t p = 0; p < n_; ++p) {
      by_position[p] = tr.action[static_cast<std::size_t>(tr.order[p])];
    }
    const double rew_bonus = sqrt_bonus(cfg_.c_rew, counts_.count(tr.key, by_position));
    out[b] = optimistic_target(tr.reward, rew_bonus, cfg_.gamma, tr.done, mixed);
  }
  return out;
}

std::optional<StepLoss> Trainer::train_step() {
  if (buffer_.size() < cfg_.batch_size) return std::nullopt;
  last_batch_ = buffer_.sample_indices(cfg_.batch_size, replay_rng_);
  switch (cfg_.variant) {
    case Variant::cond_iq: return train_cond_iq(last_batch_);
    case Variant::cond_cq: return train_cond_cq(last_batch_);
    default: return train_plain(last_batch_);
  }
}

void Trainer::apply_grads(nd::GradMap grads, double loss) {
  if (!std::isfinite(loss)) {
    throw NumericalError("non-finite training loss at step " + std::to_string(env_steps_));
  }
  if (cfg_.freeze_correction) {
    for (auto it = grads.begin(); it != grads.end();) {
      if (it->first.rfind("corr.", 0) == 0) {
        it = grads.erase(it);
      } else {
        ++it;
      }
    }
  }
  nd::OptimConfig opt;
  opt.rule = cfg_.optim_rule;
  nd::optimizer_step(online_, grads, cfg_.lr, opt);
  nd::soft_update(target_, online_, cfg_.tau);
}

StepLoss Trainer::train_plain(const std::vector<std::size_t>& batch) {
  const std::vector<double> targets = td_targets(batch);
  nd::Graph g;
  ParamVars pv(g, online_);
  std::vector<nd::Var> chosen(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    nd::Var qi = net_.q_mlp().forward(g, pv, g.constant(batch_q_inputs(batch, i, false)));
    std::vector<std::size_t> idx(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
      idx[b] = static_cast<std::size_t>(buffer_[batch[b]].action[i]);
    }
    chosen[i] = g.gather_cols(qi, std::move(idx));
  }
  nd::Var qcols = g.hstack(chosen);
  nd::Var qjoint = mixer_.forward(g, pv, qcols, batch_states(batch, false));
  nd::Var loss = g.mse(qjoint, nd::Tensor({batch.size(), 1}, std::vector<double>(targets)));
  g.backward(loss);
  const double l = g.scalar_value(loss);
  apply_grads(pv.grads(g), l);
  StepLoss out;
  out.total = l;
  return out;
}

StepLoss Trainer::train_cond_iq(const std::vector<std::size_t>& batch) {
  const std::size_t bsz = batch.size();
  // per-agent optimistic targets for both heads
  nd::Tensor y_dep({bsz, n_});
  nd::Tensor y_idp({bsz, n_});
  envs::JointAction by_position(n_);
  for (std::size_t b = 0; b < bsz; ++b) {
    const Transition& tr = buffer_[batch[b]];
    const auto [a_dep, vals_dep] =
        greedy_joint_with_bonus(target_, true, tr.next_obs, tr.next_key, tr.order);
    const auto [a_idp, vals_idp] =
        greedy_joint_with_bonus(target_, false, tr.next_obs, tr.next_key, tr.order);
    for (std::size_t p = 0; p < n_; ++p) {
      by_position[p] = tr.action[static_cast<std::size_t>(tr.order[p])];
    }
    for (std::size_t p = 0; p < n_; ++p) {
      const std::size_t agent = static_cast<std::size_t>(tr.order[p]);
      const std::span<const int> upto(by_position.data(), p + 1);
      const double rew_bonus = sqrt_bonus(cfg_.c_rew, counts_.count(tr.key, upto));
      y_dep.at(b, agent) =
          optimistic_target(tr.reward, rew_bonus, cfg_.gamma, tr.done, vals_dep[agent]);
      y_idp.at(b, agent) =
          optimistic_target(tr.reward, rew_bonus, cfg_.gamma, tr.done, vals_idp[agent]);
    }
  }

  nd::Graph g;
  ParamVars pv(g, online_);
  std::vector<nd::Var> idp_chosen(n_), dep_chosen(n_);
  const std::size_t corr_in = net_.corr_input_dim();
  for (std::size_t i = 0; i < n_; ++i) {
    std::vector<std::size_t> idx(bsz);
    for (std::size_t b = 0; b < bsz; ++b) {
      idx[b] = static_cast<std::size_t>(buffer_[batch[b]].action[i]);
    }
    nd::Var qi = net_.q_mlp().forward(g, pv, g.constant(batch_q_inputs(batch, i, false)));
    idp_chosen[i] = g.gather_cols(qi, idx);

    // dependent head: detached independent values plus the correction
    nd::Tensor corr_inputs({bsz, corr_in});
    for (std::size_t b = 0; b < bsz; ++b) {
      const Transition& tr = buffer_[batch[b]];
      const std::vector<int> prefix = predecessor_actions(tr, i);
      net_.write_corr_input(tr.obs[i], i, prefix, corr_inputs.data() + b * corr_in);
    }
    nd::Var ci = net_.corr_mlp().forward(g, pv, g.constant(std::move(corr_inputs)));
    nd::Var corr_chosen = g.gather_cols(ci, idx);
    nd::Tensor detached = net_.q_mlp().forward(online_, batch_q_inputs(batch, i, false));
    nd::Tensor detached_chosen({bsz, 1});
    for (std::size_t b = 0; b < bsz; ++b) detached_chosen[b] = detached.at(b, idx[b]);
    dep_chosen[i] = g.add(g.constant(std::move(detached_chosen)), corr_chosen);
  }
  nd::Var loss_dep = g.mse(g.hstack(dep_chosen), std::move(y_dep));
  nd::Var loss_idp = g.mse(g.hstack(idp_chosen), std::move(y_idp));
  nd::Var total = g.add(loss_dep, loss_idp);
  g.backward(total);
  StepLoss out;
  out.dep = g.scalar_value(loss_dep);
  out.idp = g.scalar_value(loss_idp);
  out.total = g.scalar_value(total);
  apply_grads(pv.grads(g), out.total);
  return out;
}

StepLoss Trainer::train_cond_cq(const std::vector<std::size_t>& batch) {
  const std::size_t bsz = batch.size();
  std::vector<double> y_dep(bsz), y_idp(bsz);
  envs::JointAction by_position(n_);
  for (std::size_t b = 0; b < bsz; ++b) {
    const Transition& tr = buffer_[batch[b]];
    const auto [a_dep, vals_dep] =
        greedy_joint_with_bonus(target_, true, tr.next_obs, tr.next_key, tr.order);
    const auto [a_idp, vals_idp] =
        greedy_joint_with_bonus(target_, false, tr.next_obs, tr.next_key, tr.order);
    for (std::size_t p = 0; p < n_; ++p) {
      by_position[p] = tr.action[static_cast<std::size_t>(tr.order[p])];
    }
    const double rew_bonus = sqrt_bonus(cfg_.c_rew, counts_.count(tr.key, by_position));
    y_dep[b] = optimistic_target(tr.reward, rew_bonus, cfg_.gamma, tr.done,
                                 mixer_.forward(target_, vals_dep, tr.next_state));
    y_idp[b] = optimistic_target(tr.reward, rew_bonus, cfg_.gamma, tr.done,
                                 mixer_.forward(target_, vals_idp, tr.next_state));
  }

  nd::Graph g;
  ParamVars pv(g, online_);
  std::vector<nd::Var> idp_chosen(n_), dep_chosen(n_);
  const std::size_t corr_in = net_.corr_input_dim();
  for (std::size_t i = 0; i < n_; ++i) {
    std::vector<std::size_t> idx(bsz);
    for (std::size_t b = 0; b < bsz; ++b) {
      idx[b] = static_cast<std::size_t>(buffer_[batch[b]].action[i]);
    }
    nd::Var qi = net_.q_mlp().forward(g, pv, g.constant(batch_q_inputs(batch, i, false)));
    idp_chosen[i] = g.gather_cols(qi, idx);

    nd::Tensor corr_inputs({bsz, corr_in});
    for (std::size_t b = 0; b < bsz; ++b) {
      const Transition& tr = buffer_[batch[b]];
      const std::vector<int> prefix = predecessor_actions(tr, i);
      net_.write_corr_input(tr.obs[i], i, prefix, corr_inputs.data() + b * corr_in);
    }
    nd::Var ci = net_.corr_mlp().forward(g, pv, g.constant(std::move(corr_inputs)));
    nd::Var corr_chosen = g.gather_cols(ci, idx);
    nd::Tensor detached = net_.q_mlp().forward(online_, batch_q_inputs(batch, i, false));
    nd::Tensor detached_chosen({bsz, 1});
    for (std::size_t b = 0; b < bsz; ++b) detached_chosen[b] = detached.at(b, idx[b]);
    dep_chosen[i] = g.add(g.constant(std::move(detached_chosen)), corr_chosen);
  }
  const nd::Tensor states = batch_states(batch, false);
  nd::Var qjoint_dep = mixer_.forward(g, pv, g.hstack(dep_chosen), states);
  nd::Var qjoint_idp = mixer_.forward(g, pv, g.hstack(idp_chosen), states);
  nd::Var loss_dep = g.mse(qjoint_dep, nd::Tensor({bsz, 1}, std::vector<double>(y_dep)));
  nd::Var loss_idp = g.mse(qjoint_idp, nd::Tensor({bsz, 1}, std::vector<double>(y_idp)));
  nd::Var total = g.add(loss_dep, loss_idp);
  g.backward(total);
  StepLoss out;
  out.dep = g.scalar_value(loss_dep);
  out.idp = g.scalar_value(loss_idp);
  out.total = g.scalar_value(total);
  apply_grads(pv.grads(g), out.total);
  return out;
}

EvalResult Trainer::evaluate(std::size_t episodes, std::uint64_t eval_seed) const {
  std::unique_ptr<envs::Env> eval_env = env_->clone();
  eval_env->reseed(eval_seed);
  return run_greedy_episodes(*eval_env, episodes,
                             [this](const envs::EnvState& st) { return greedy_actions(st.obs); });
}

void Trainer::run(std::uint64_t total_steps, std::uint64_t eval_interval,
                  std::size_t eval_episodes, const std::function<void(const MetricsRow&)>& sink,
                  envs::TraceWriter* trace) {
  if (eval_interval == 0 || total_steps % eval_interval != 0) {
    throw ConfigError("evaluation interval must divide total steps");
  }
  double loss_acc = 0.0;
  std::uint64_t loss_n = 0;
  std::uint64_t eval_idx = 0;
  auto emit = [&]() {
    const EvalResult ev = evaluate(eval_episodes, mix64(seed_ ^ (0x9e01 + eval_idx)));
    MetricsRow row;
    row.step = env_steps_;
    row.eval_mean_return = ev.mean;
    row.eval_std_return = ev.stddev;
    row.train_loss = loss_n ? loss_acc / static_cast<double>(loss_n) : 0.0;
    row.epsilon = epsilon_now();
    row.buffer_size = buffer_.size();
    row.distinct_count_keys = counts_.distinct_keys();
    sink(row);
    loss_acc = 0.0;
    loss_n = 0;
    eval_idx += 1;
  };
  while (env_steps_ < total_steps) {
    if (env_steps_ % eval_interval == 0) emit();
    collect_step(trace);
    if (env_steps_ % cfg_.train_interval == 0) {
      if (const auto l = train_step()) {
        loss_acc += l->total;
        loss_n += 1;
      }
    }
  }
  emit();
}

}  // namespace coex::marl

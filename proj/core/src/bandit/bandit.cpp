#include "coex/bandit/bandit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "coex/counting/count_store.hpp"
#include "coex/util/errors.hpp"

namespace coex::bandit {

using counting::ucb_bonus;

Variant parse_variant(const std::string& name) {
  if (name == "dep-rew-dep-opt") return Variant::dep_rew_dep_opt;
  if (name == "ind-rew-dep-opt") return Variant::ind_rew_dep_opt;
  if (name == "ind-rew-ind-opt") return Variant::ind_rew_ind_opt;
  if (name == "ucb-cen") return Variant::ucb_cen;
  throw ConfigError("unknown bandit variant: " + name);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::dep_rew_dep_opt: return "dep-rew-dep-opt";
    case Variant::ind_rew_dep_opt: return "ind-rew-dep-opt";
    case Variant::ind_rew_ind_opt: return "ind-rew-ind-opt";
    case Variant::ucb_cen: return "ucb-cen";
  }
  return "?";
}

namespace {

std::size_t pow_size(int k, std::size_t n) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (out > (std::size_t{1} << 24) / static_cast<std::size_t>(k)) {
      throw ConfigError("joint action space too large for tabular learner");
    }
    out *= static_cast<std::size_t>(k);
  }
  return out;
}

}  // namespace

Learner::Learner(Variant variant, std::size_t n_agents, int n_actions, double c)
    : variant_(variant), n_(n_agents), k_(n_actions), c_(c) {
  if (n_ == 0 || k_ <= 0) throw ConfigError("learner needs agents and actions");
  if (c_ < 0.0) throw ConfigError("exploration constant must be >= 0");
  const bool needs_tree =
      variant_ == Variant::dep_rew_dep_opt || variant_ == Variant::ind_rew_dep_opt;
  if (needs_tree) {
    tree_x_.resize(n_ + 1);
    tree_n_.resize(n_ + 1);
    std::size_t level = 1;
    for (std::size_t l = 0; l <= n_; ++l) {
      if (variant_ == Variant::dep_rew_dep_opt) tree_x_[l].assign(level, 0.0);
      tree_n_[l].assign(level, 0);
      if (l < n_) level = pow_size(k_, l + 1);
    }
  }
  if (variant_ == Variant::ind_rew_dep_opt || variant_ == Variant::ind_rew_ind_opt) {
    agent_x_.assign(n_ * static_cast<std::size_t>(k_), 0.0);
    agent_n_.assign(n_ * static_cast<std::size_t>(k_), 0);
  }
  if (variant_ == Variant::ucb_cen) {
    const std::size_t arms = pow_size(k_, n_);
    cen_x_.assign(arms, 0.0);
    cen_n_.assign(arms, 0);
  }
}

std::size_t Learner::tree_index(const envs::JointAction& prefix) const {
  std::size_t idx = 0;
  for (int a : prefix) idx = idx * static_cast<std::size_t>(k_) + static_cast<std::size_t>(a);
  return idx;
}

envs::JointAction Learner::select(std::uint64_t /*t*/) const {
  envs::JointAction action(n_, 0);
  switch (variant_) {
    case Variant::dep_rew_dep_opt:
    case Variant::ind_rew_dep_opt: {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        const std::uint64_t parent = tree_n_[i][idx];
        double best = -std::numeric_limits<double>::infinity();
        int best_a = 0;
        for (int a = 0; a < k_; ++a) {
          const std::size_t child = idx * static_cast<std::size_t>(k_) + a;
          const double mean = variant_ == Variant::dep_rew_dep_opt
                                  ? tree_x_[i + 1][child]
                                  : agent_x_[i * static_cast<std::size_t>(k_) + a];
          const double v = mean + ucb_bonus(c_, parent, tree_n_[i + 1][child]);
          if (v > best) {
            best = v;
            best_a = a;
          }
        }
        action[i] = best_a;
        idx = idx * static_cast<std::size_t>(k_) + static_cast<std::size_t>(best_a);
      }
      break;
    }
    case Variant::ind_rew_ind_opt: {
      for (std::size_t i = 0; i < n_; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        int best_a = 0;
        for (int a = 0; a < k_; ++a) {
          const std::size_t cell = i * static_cast<std::size_t>(k_) + a;
          const double v = agent_x_[cell] + ucb_bonus(c_, total_, agent_n_[cell]);
          if (v > best) {
            best = v;
            best_a = a;
          }
        }
        action[i] = best_a;
      }
      break;
    }
    case Variant::ucb_cen: {
      double best = -std::numeric_limits<double>::infinity();
      std::size_t best_arm = 0;
      for (std::size_t arm = 0; arm < cen_x_.size(); ++arm) {
        const double v = cen_x_[arm] + ucb_bonus(c_, total_, cen_n_[arm]);
        if (v > best) {
          best = v;
          best_arm = arm;
        }
      }
      // decode, agent 0 highest digit
      std::size_t rem = best_arm;
      for (std::size_t i = n_; i-- > 0;) {
        action[i] = static_cast<int>(rem % static_cast<std::size_t>(k_));
        rem /= static_cast<std::size_t>(k_);
      }
      break;
    }
  }
  return action;
}

void Learner::update(const envs::JointAction& a, double payoff) {
  if (a.size() != n_) throw ConfigError("joint action length mismatch");
  total_ += 1;
  auto bump = [payoff](double& x, std::uint64_t& n) {
    n += 1;
    x += (payoff - x) / static_cast<double>(n);
  };
  switch (variant_) {
    case Variant::dep_rew_dep_opt: {
      std::size_t idx = 0;
      bump(tree_x_[0][0], tree_n_[0][0]);
      for (std::size_t l = 1; l <= n_; ++l) {
        idx = idx * static_cast<std::size_t>(k_) + static_cast<std::size_t>(a[l - 1]);
        bump(tree_x_[l][idx], tree_n_[l][idx]);
      }
      break;
    }
    case Variant::ind_rew_dep_opt: {
      std::size_t idx = 0;
      tree_n_[0][0] += 1;
      for (std::size_t l = 1; l <= n_; ++l) {
        idx = idx * static_cast<std::size_t>(k_) + static_cast<std::size_t>(a[l - 1]);
        tree_n_[l][idx] += 1;
      }
      for (std::size_t i = 0; i < n_; ++i) {
        bump(agent_x_[i * static_cast<std::size_t>(k_) + a[i]],
             agent_n_[i * static_cast<std::size_t>(k_) + a[i]]);
      }
      break;
    }
    case Variant::ind_rew_ind_opt: {
      for (std::size_t i = 0; i < n_; ++i) {
        bump(agent_x_[i * static_cast<std::size_t>(k_) + a[i]],
             agent_n_[i * static_cast<std::size_t>(k_) + a[i]]);
      }
      break;
    }
    case Variant::ucb_cen: {
      const std::size_t arm = tree_index(a);
      bump(cen_x_[arm], cen_n_[arm]);
      break;
    }
  }
}

std::uint64_t Learner::prefix_count(const envs::JointAction& prefix) const {
  if (!tree_n_.empty()) return tree_n_[prefix.size()][tree_index(prefix)];
  if (variant_ == Variant::ucb_cen && prefix.size() == n_) return cen_n_[tree_index(prefix)];
  if (prefix.empty()) return total_;
  throw ConfigError("variant does not store prefix counts");
}

double Learner::prefix_mean(const envs::JointAction& prefix) const {
  if (variant_ == Variant::dep_rew_dep_opt) return tree_x_[prefix.size()][tree_index(prefix)];
  if (variant_ == Variant::ucb_cen && prefix.size() == n_) return cen_x_[tree_index(prefix)];
  throw ConfigError("variant does not store prefix means");
}

std::uint64_t Learner::agent_count(std::size_t agent, int action) const {
  if (agent_n_.empty()) throw ConfigError("variant does not store per-agent counts");
  return agent_n_[agent * static_cast<std::size_t>(k_) + action];
}

double Learner::agent_mean(std::size_t agent, int action) const {
  if (agent_x_.empty()) throw ConfigError("variant does not store per-agent means");
  return agent_x_[agent * static_cast<std::size_t>(k_) + action];
}

void Learner::add_to_all_means(double delta) {
  for (auto& level : tree_x_) {
    for (double& x : level) x += delta;
  }
  for (double& x : agent_x_) x += delta;
  for (double& x : cen_x_) x += delta;
}

namespace {

struct SeedTrace {
  std::vector<double> cum_regret;
  std::vector<double> opt_window;
  std::vector<double> opt_cum;
};

SeedTrace run_seed(Variant variant, const GameSpec& spec, std::uint64_t seed) {
  envs::BernoulliGame game(spec.n_agents, spec.n_actions, spec.suboptimality);
  game.reset(seed);
  Learner learner(variant, spec.n_agents, spec.n_actions, spec.c);

  SeedTrace tr;
  tr.cum_regret.resize(spec.horizon);
  tr.opt_window.resize(spec.horizon);
  tr.opt_cum.resize(spec.horizon);
  std::vector<unsigned char> ring(spec.window, 0);
  std::size_t in_window = 0;
  std::uint64_t opt_total = 0;
  double cum = 0.0;
  for (std::uint64_t t = 0; t < spec.horizon; ++t) {
    const envs::JointAction a = learner.select(t + 1);
    const envs::StepResult r = game.step(a);
    learner.update(a, r.reward);
    const bool opt = a == game.optimal_action();
    cum += envs::BernoulliGame::kOptimalPayoff - game.expected_payoff(a);
    opt_total += opt ? 1 : 0;
    const std::size_t slot = static_cast<std::size_t>(t % spec.window);
    if (t >= spec.window) in_window -= ring[slot];
    ring[slot] = opt ? 1 : 0;
    in_window += ring[slot];
    const std::size_t denom = std::min<std::uint64_t>(t + 1, spec.window);
    tr.cum_regret[t] = cum;
    tr.opt_window[t] = static_cast<double>(in_window) / static_cast<double>(denom);
    tr.opt_cum[t] = static_cast<double>(opt_total) / static_cast<double>(t + 1);
  }
  return tr;
}

void mean_se(const std::vector<std::vector<double>>& rows, std::size_t t, double& mean,
             double& se) {
  const std::size_t s = rows.size();
  double acc = 0.0;
  for (const auto& r : rows) acc += r[t];
  mean = acc / static_cast<double>(s);
  if (s < 2) {
    se = 0.0;
    return;
  }
  double sq = 0.0;
  for (const auto& r : rows) {
    const double d = r[t] - mean;
    sq += d * d;
  }
  se = std::sqrt(sq / static_cast<double>(s - 1)) / std::sqrt(static_cast<double>(s));
}

}  // namespace

RegretTrace run_game(Variant variant, const GameSpec& spec, std::size_t n_threads) {
  if (spec.horizon < 1 || spec.n_seeds < 1) throw ConfigError("horizon and seeds must be >= 1");
  if (spec.window < 1) throw ConfigError("window must be >= 1");

  std::vector<SeedTrace> traces(spec.n_seeds);
  std::size_t workers = n_threads ? n_threads : std::thread::hardware_concurrency();
  workers = std::max<std::size_t>(1, std::min(workers, spec.n_seeds));
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= spec.n_seeds) return;
        traces[i] = run_seed(variant, spec, spec.seed_base + i);
      }
    });
  }
  for (auto& th : pool) th.join();

  RegretTrace out;
  out.n_seeds = spec.n_seeds;
  out.mean_cum_regret.resize(spec.horizon);
  out.se_cum_regret.resize(spec.horizon);
  out.mean_opt_window.resize(spec.horizon);
  out.se_opt_window.resize(spec.horizon);
  out.mean_opt_cum.resize(spec.horizon);
  out.se_opt_cum.resize(spec.horizon);

  std::vector<std::vector<double>> cum, win, tot;
  cum.reserve(spec.n_seeds);
  win.reserve(spec.n_seeds);
  tot.reserve(spec.n_seeds);
  for (auto& tr : traces) {
    cum.push_back(std::move(tr.cum_regret));
    win.push_back(std::move(tr.opt_window));
    tot.push_back(std::move(tr.opt_cum));
  }
  for (std::uint64_t t = 0; t < spec.horizon; ++t) {
    mean_se(cum, t, out.mean_cum_regret[t], out.se_cum_regret[t]);
    mean_se(win, t, out.mean_opt_window[t], out.se_opt_window[t]);
    mean_se(tot, t, out.mean_opt_cum[t], out.se_opt_cum[t]);
  }
  const std::size_t last = spec.horizon - 1;
  for (std::size_t i = 0; i < spec.n_seeds; ++i) {
    out.final_cum_regret.push_back(cum[i][last]);
    out.final_opt_window.push_back(win[i][last]);
  }
  return out;
}

void write_regret_csv(const std::string& path, const RegretTrace& trace) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open output csv: " + path);
  os << "step,mean_cum_regret,se_cum_regret,mean_opt_rate,se_opt_rate,"
        "mean_opt_rate_cum,se_opt_rate_cum\n";
  os.precision(10);
  for (std::size_t t = 0; t < trace.mean_cum_regret.size(); ++t) {
    os << (t + 1) << ',' << trace.mean_cum_regret[t] << ',' << trace.se_cum_regret[t] << ','
       << trace.mean_opt_window[t] << ',' << trace.se_opt_window[t] << ','
       << trace.mean_opt_cum[t] << ',' << trace.se_opt_cum[t] << '\n';
  }
  if (!os) throw ConfigError("write failed: " + path);
}

}  // namespace coex::bandit

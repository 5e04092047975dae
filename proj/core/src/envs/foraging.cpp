#include "coex/envs/foraging.hpp"

#include <algorithm>
#include <map>

#include "coex/util/errors.hpp"
#include "coex/util/rng.hpp"

namespace coex::envs {

ForagingEnv::ForagingEnv(ForagingConfig cfg) : cfg_(cfg) {
  if (cfg_.width < 2 || cfg_.height < 2) throw ConfigError("foraging grid too small");
  if (cfg_.n_agents < 1 || cfg_.n_foods < 1) throw ConfigError("foraging needs agents and foods");
  if (cfg_.max_agent_level < 1) throw ConfigError("max agent level must be >= 1");
  if (cfg_.episode_limit < 1) throw ConfigError("episode limit must be >= 1");
  if (cfg_.n_agents + cfg_.n_foods > cfg_.width * cfg_.height) {
    throw ConfigError("more entities than grid cells");
  }
}

EnvState ForagingEnv::reset(std::uint64_t seed) {
  rng_ = make_rng(seed, Stream::env);
  return begin_episode();
}

void ForagingEnv::reseed(std::uint64_t seed) { rng_ = make_rng(seed, Stream::env); }

std::unique_ptr<Env> ForagingEnv::clone() const { return std::make_unique<ForagingEnv>(*this); }

bool ForagingEnv::occupied(int x, int y) const {
  for (const Agent& a : agents_) {
    if (a.x == x && a.y == y) return true;
  }
  for (const Food& f : foods_) {
    if (f.present && f.x == x && f.y == y) return true;
  }
  return false;
}

EnvState ForagingEnv::begin_episode() {
  t_ = 0;
  agents_.assign(cfg_.n_agents, Agent{});
  foods_.assign(cfg_.n_foods, Food{});
  std::uniform_int_distribution<int> rx(0, cfg_.width - 1);
  std::uniform_int_distribution<int> ry(0, cfg_.height - 1);
  std::uniform_int_distribution<int> rlevel(1, cfg_.max_agent_level);

  auto place = [&](int& x, int& y) {
    do {
      x = rx(rng_);
      y = ry(rng_);
    } while (occupied(x, y));
  };

  for (Agent& a : agents_) {
    place(a.x, a.y);
    a.level = rlevel(rng_);
  }
  // Food levels are capped by the total level of agents that can surround a
  // cell (at most 4 loaders), so every food is collectible by some coalition.
  std::vector<int> levels;
  for (const Agent& a : agents_) levels.push_back(a.level);
  std::sort(levels.rbegin(), levels.rend());
  int cap = 0;
  for (std::size_t i = 0; i < levels.size() && i < 4; ++i) cap += levels[i];
  std::uniform_int_distribution<int> rfood(1, cap);
  total_food_level_ = 0;
  for (Food& f : foods_) {
    f.present = true;
    place(f.x, f.y);
    f.level = rfood(rng_);
    total_food_level_ += f.level;
  }
  return make_state();
}

StepResult ForagingEnv::step(const JointAction& action) {
  if (action.size() != num_agents()) throw ConfigError("joint action length mismatch");
  for (int a : action) {
    if (a < 0 || a >= kActions) throw ConfigError("action index out of range");
  }

  // Movement. A move is valid if the target cell is inside the grid and not
  // occupied by any food or any agent's current position; simultaneous moves
  // into the same free cell all cancel. Order-independent by construction.
  static constexpr int dx[kActions] = {0, 0, 0, -1, 1, 0};
  static constexpr int dy[kActions] = {0, -1, 1, 0, 0, 0};
  std::vector<std::pair<int, int>> target(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const Agent& ag = agents_[i];
    int nx = ag.x + dx[action[i]];
    int ny = ag.y + dy[action[i]];
    const bool is_move = action[i] >= 1 && action[i] <= 4;
    if (!is_move || nx < 0 || nx >= cfg_.width || ny < 0 || ny >= cfg_.height ||
        occupied(nx, ny)) {
      target[i] = {ag.x, ag.y};
    } else {
      target[i] = {nx, ny};
    }
  }
  std::map<std::pair<int, int>, int> claims;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (target[i] != std::make_pair(agents_[i].x, agents_[i].y)) claims[target[i]] += 1;
  }
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (claims[target[i]] == 1) {
      agents_[i].x = target[i].first;
      agents_[i].y = target[i].second;
    }
  }

  // Loading: every food gathers the adjacent loaders; collected when their
  // level sum reaches the food level.
  double reward = 0.0;
  for (Food& f : foods_) {
    if (!f.present) continue;
    int level_sum = 0;
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      if (action[i] != 5) continue;
      const Agent& ag = agents_[i];
      if (std::abs(ag.x - f.x) + std::abs(ag.y - f.y) == 1) level_sum += ag.level;
    }
    if (level_sum >= f.level) {
      f.present = false;
      reward += static_cast<double>(f.level) / static_cast<double>(total_food_level_);
      f.x = 0;
      f.y = 0;
    }
  }

  t_ += 1;
  StepResult out;
  out.reward = reward;
  out.done = all_collected() || t_ >= cfg_.episode_limit;
  out.next = make_state();
  return out;
}

bool ForagingEnv::all_collected() const {
  return std::none_of(foods_.begin(), foods_.end(), [](const Food& f) { return f.present; });
}

double ForagingEnv::collected_fraction() const {
  int remaining = 0;
  for (const Food& f : foods_) {
    if (f.present) remaining += f.level;
  }
  return 1.0 - static_cast<double>(remaining) / static_cast<double>(total_food_level_);
}

std::vector<int> ForagingEnv::action_space() const {
  return std::vector<int>(num_agents(), kActions);
}

std::size_t ForagingEnv::state_dim() const {
  return 3 * static_cast<std::size_t>(cfg_.n_agents) + 4 * static_cast<std::size_t>(cfg_.n_foods);
}

std::vector<double> ForagingEnv::global_state() const {
  std::vector<double> s;
  s.reserve(state_dim());
  const double level_norm = static_cast<double>(4 * cfg_.max_agent_level);
  for (const Agent& a : agents_) {
    s.push_back(static_cast<double>(a.x) / cfg_.width);
    s.push_back(static_cast<double>(a.y) / cfg_.height);
    s.push_back(static_cast<double>(a.level) / cfg_.max_agent_level);
  }
  for (const Food& f : foods_) {
    if (f.present) {
      s.push_back(static_cast<double>(f.x) / cfg_.width);
      s.push_back(static_cast<double>(f.y) / cfg_.height);
      s.push_back(static_cast<double>(f.level) / level_norm);
      s.push_back(1.0);
    } else {
      s.insert(s.end(), {0.0, 0.0, 0.0, 0.0});
    }
  }
  return s;
}

EnvState ForagingEnv::make_state() const {
  EnvState st;
  st.state = global_state();
  st.obs.assign(num_agents(), st.state);  // fully observable
  st.t = t_;
  return st;
}

}  // namespace coex::envs

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "coex/envs/env.hpp"
#include "coex/marl/config.hpp"

namespace coex::harness {

/// Everything one experiment needs: environment id, algorithm config,
/// protocol constants, seeds, output directory.
struct ExperimentSpec {
  std::string env_id;
  marl::COEConfig cfg;
  std::uint64_t total_steps = 200000;
  std::uint64_t eval_interval = 10000;
  std::size_t eval_episodes = 20;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string out_dir = "out";

  void validate() const;
};

/// Flat key = value file; '#' starts a comment. Unknown keys, malformed
/// values, and violated invariants are reported with their line number.
/// Recognized keys: env, variant, c_act, c_rew, c_boot, gamma, lr, k, batch,
/// buffer, tau, total_steps, eval_interval, eval_episodes, seeds,
/// epsilon_start, epsilon_end, epsilon_anneal, mixer, out_dir.
ExperimentSpec parse_config(const std::string& path);

/// Parses config text (exposed for tests).
ExperimentSpec parse_config_text(const std::string& text, const std::string& origin = "<text>");

/// Environment ids:
///   bernoulli-<N>p-<K>a[-sub<P0>]           e.g. bernoulli-8p-3a-sub0.4
///   foraging-<W>x<H>-<N>p-<F>f[-l<L>][-t<T>] e.g. foraging-10x10-3p-3f
std::unique_ptr<envs::Env> make_env(const std::string& env_id);

/// Output root: the COEX_OUT_DIR environment variable overrides the config's
/// out_dir when set.
std::string effective_out_dir(const std::string& configured);

}  // namespace coex::harness

#pragma once

#include <string>

#include "coex/harness/config.hpp"
#include "coex/marl/trainer.hpp"

namespace coex::harness {

/// Greedy evaluation of a trained policy: bonuses removed, epsilon 0.
double evaluate(const marl::Trainer& trainer, std::size_t episodes, std::uint64_t seed);

/// Runs one seed of an experiment. Writes <out>/metrics_seed<N>.csv and a
/// final parameter checkpoint <out>/params_seed<N>.coex. Returns the
/// metrics csv path.
std::string run_experiment_seed(const ExperimentSpec& spec, std::uint64_t seed,
                                const std::string& trace_path = "");

/// Runs every seed of the spec sequentially (the CLI `train` entry point;
/// the sweep driver parallelizes across processes instead).
void run_experiment(const ExperimentSpec& spec, const std::string& trace_path = "");

}  // namespace coex::harness

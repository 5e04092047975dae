#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "coex/bandit/bandit.hpp"
#include "coex/harness/aggregate.hpp"
#include "coex/harness/config.hpp"
#include "coex/harness/run.hpp"
#include "coex/harness/sweep.hpp"
#include "coex/util/errors.hpp"

namespace {

std::string format_sub(double p0) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", p0);
  return buf;
}

int run_bandit(const std::string& variant_name, std::size_t agents, int actions,
               std::vector<double> suboptimalities, std::uint64_t horizon, std::size_t seeds,
               double c, std::size_t window, std::string out_dir, std::size_t threads) {
  if (suboptimalities.empty()) suboptimalities = {0.0, 0.4, 0.8};
  out_dir = coex::harness::effective_out_dir(out_dir);
  std::filesystem::create_directories(out_dir);
  const coex::bandit::Variant variant = coex::bandit::parse_variant(variant_name);
  for (double p0 : suboptimalities) {
    coex::bandit::GameSpec spec;
    spec.n_agents = agents;
    spec.n_actions = actions;
    spec.suboptimality = p0;
    spec.horizon = horizon;
    spec.n_seeds = seeds;
    spec.c = c;
    spec.window = window;
    const coex::bandit::RegretTrace trace = coex::bandit::run_game(variant, spec, threads);
    const std::string path =
        out_dir + "/bandit_" + variant_name + "_sub" + format_sub(p0) + ".csv";
    coex::bandit::write_regret_csv(path, trace);
    std::cout << path << "  final_opt_rate=" << trace.mean_opt_window.back()
              << "  final_cum_regret=" << trace.mean_cum_regret.back() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale cooperative exploration lab"};
  app.require_subcommand(1);

  // bandit
  auto* bandit = app.add_subcommand("bandit", "Didactic repeated Bernoulli game");
  std::string variant = "dep-rew-dep-opt";
  std::size_t agents = 8;
  int actions = 3;
  std::vector<double> subs;
  std::uint64_t horizon = 30000;
  std::size_t seeds = 50;
  double c = 1.0;
  std::size_t window = 100;
  std::string bandit_out = "bandit_out";
  std::size_t threads = std::thread::hardware_concurrency();
  bandit->add_option("--variant", variant,
                     "dep-rew-dep-opt | ind-rew-dep-opt | ind-rew-ind-opt | ucb-cen");
  bandit->add_option("--agents", agents, "number of agents");
  bandit->add_option("--actions", actions, "actions per agent");
  bandit->add_option("--suboptimality", subs, "sub-optimal payoff probability (repeatable)");
  bandit->add_option("--horizon", horizon, "steps per seed");
  bandit->add_option("--seeds", seeds, "number of seeds");
  bandit->add_option("--c", c, "exploration constant");
  bandit->add_option("--window", window, "trailing opt-rate window");
  bandit->add_option("--out", bandit_out, "output directory");
  bandit->add_option("--threads", threads, "parallel seed workers");

  // train
  auto* train = app.add_subcommand("train", "Train one configuration");
  std::string config_path;
  std::int64_t seed = -1;
  std::string trace_path;
  train->add_option("--config", config_path, "experiment config file")->required();
  train->add_option("--seed", seed, "run a single seed (default: all seeds in config)");
  train->add_option("--trace", trace_path, "episode transcript JSONL dump");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Grid search over a config grid");
  std::string grid_path;
  std::string sweep_out = "sweep_out";
  std::size_t jobs = std::thread::hardware_concurrency();
  sweep->add_option("--grid", grid_path, "grid file (comma lists are swept)")->required();
  sweep->add_option("--out", sweep_out, "output root");
  sweep->add_option("--jobs", jobs, "max parallel worker processes");

  // report
  auto* report = app.add_subcommand("report", "Aggregate per-seed metrics in a directory");
  std::string report_dir;
  report->add_option("--dir", report_dir, "directory with metrics_seed*.csv")->required();

  try {
    app.parse(argc, argv);
    if (*bandit) {
      return run_bandit(variant, agents, actions, subs, horizon, seeds, c, window, bandit_out,
                        threads);
    }
    if (*train) {
      coex::harness::ExperimentSpec spec = coex::harness::parse_config(config_path);
      spec.out_dir = coex::harness::effective_out_dir(spec.out_dir);
      if (seed >= 0) {
        const std::string csv = coex::harness::run_experiment_seed(
            spec, static_cast<std::uint64_t>(seed), trace_path);
        std::cout << csv << "\n";
      } else {
        coex::harness::run_experiment(spec, trace_path);
        std::cout << spec.out_dir << "\n";
      }
      return 0;
    }
    if (*sweep) {
      const std::string root = coex::harness::effective_out_dir(sweep_out);
      const coex::harness::SweepResult result =
          coex::harness::run_sweep(grid_path, root, jobs);
      for (const auto& name : result.excluded) {
        std::cout << "excluded (all-zero optimism): " << name << "\n";
      }
      std::cout << "rank  max_return  avg_return  cell\n";
      for (std::size_t r = 0; r < result.ranking.size(); ++r) {
        const auto& cell = result.ranking[r];
        std::printf("%4zu  %10.4f  %10.4f  %s\n", r + 1, cell.max_return, cell.average_return,
                    cell.name.c_str());
      }
      std::cout << result.ranking_csv << "\n";
      return 0;
    }
    if (*report) {
      const coex::harness::RunSummary summary = coex::harness::aggregate_dir(report_dir);
      coex::harness::write_summary_json(report_dir + "/summary.json", summary);
      coex::harness::write_curve_dat(report_dir + "/curve.dat", summary);
      std::printf("seeds=%zu%s  average_return=%.4f  max_return=%.4f\n", summary.n_seeds,
                  summary.single_seed ? " (single seed: CI half-width 0)" : "",
                  summary.average_return, summary.max_return);
      std::printf("%10s  %10s  %10s  %10s\n", "step", "mean", "lo", "hi");
      for (std::size_t t = 0; t < summary.steps.size(); ++t) {
        std::printf("%10llu  %10.4f  %10.4f  %10.4f\n",
                    static_cast<unsigned long long>(summary.steps[t]), summary.mean[t],
                    summary.lo[t], summary.hi[t]);
      }
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const coex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const coex::NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

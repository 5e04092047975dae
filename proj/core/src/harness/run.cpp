#include "coex/harness/run.hpp"

#include <filesystem>
#include <fstream>

#include "coex/ndgrad/checkpoint.hpp"
#include "coex/util/errors.hpp"

namespace coex::harness {

double evaluate(const marl::Trainer& trainer, std::size_t episodes, std::uint64_t seed) {
  return trainer.evaluate(episodes, seed).mean;
}

std::string run_experiment_seed(const ExperimentSpec& spec, std::uint64_t seed,
                                const std::string& trace_path) {
  spec.validate();
  // COEX_OUT_DIR resolution happens at the CLI boundary, not here, so the
  // sweep driver can hand each worker its own cell directory.
  const std::string& out_dir = spec.out_dir;
  std::filesystem::create_directories(out_dir);
  const std::string csv_path = out_dir + "/metrics_seed" + std::to_string(seed) + ".csv";
  std::ofstream csv(csv_path);
  if (!csv) throw ConfigError("cannot open metrics csv for writing: " + csv_path);
  csv << "step,eval_mean_return,eval_std_return,train_loss,epsilon,buffer_size,"
         "distinct_count_keys\n";
  csv.precision(10);

  marl::Trainer trainer(make_env(spec.env_id), spec.cfg, seed);
  std::unique_ptr<envs::TraceWriter> trace;
  if (!trace_path.empty()) trace = std::make_unique<envs::TraceWriter>(trace_path);

  trainer.run(spec.total_steps, spec.eval_interval, spec.eval_episodes,
              [&](const marl::MetricsRow& row) {
                csv << row.step << ',' << row.eval_mean_return << ',' << row.eval_std_return
                    << ',' << row.train_loss << ',' << row.epsilon << ',' << row.buffer_size
                    << ',' << row.distinct_count_keys << '\n';
                csv.flush();
              },
              trace.get());

  nd::save_checkpoint(out_dir + "/params_seed" + std::to_string(seed) + ".coex",
                      trainer.online_params());
  return csv_path;
}

void run_experiment(const ExperimentSpec& spec, const std::string& trace_path) {
  for (std::uint64_t seed : spec.seeds) {
    run_experiment_seed(spec, seed, trace_path);
  }
}

}  // namespace coex::harness

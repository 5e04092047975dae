#pragma once

#include <string>
#include <vector>

namespace coex::harness {

/// Bounded pool of worker processes (fork + exec). Children run with
/// COEX_OUT_DIR cleared so each worker honors the out_dir it was given.
class ProcessPool {
 public:
  explicit ProcessPool(std::size_t max_parallel);
  void submit(const std::vector<std::string>& argv);
  /// Waits for every child; returns true when all exited 0.
  bool wait_all();

 private:
  void reap_one();

  std::size_t max_parallel_;
  std::size_t running_ = 0;
  bool all_ok_ = true;
};

struct SweepCell {
  std::string name;
  std::string dir;
  std::string config_path;
  double max_return = 0.0;
  double average_return = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> ranking;  // sorted by max_return, ties in grid order
  std::vector<std::string> excluded;  // skipped cells (all-zero bonus combos)
  std::string ranking_csv;
};

/// Grid file: the flat config format where any value except `seeds` may be a
/// comma list; listed keys are crossed. Every cell runs all sweep seeds
/// through worker processes, then cells are ranked by maximum evaluation
/// return. Cells where every optimism scale is zero are skipped for
/// count-based variants (that combination is the plain greedy baseline).
SweepResult run_sweep(const std::string& grid_path, const std::string& out_root,
                      std::size_t max_procs);

std::string current_exe_path();

}  // namespace coex::harness

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coex::harness {

/// Cross-seed aggregate of per-run metrics: per-point mean evaluation return
/// with a 95% CI, plus the two scalar summaries used for ranking (average
/// over points, maximum over points of the cross-seed mean).
struct RunSummary {
  std::vector<std::uint64_t> steps;
  std::vector<double> mean, lo, hi;
  double average_return = 0.0;
  double max_return = 0.0;
  std::size_t n_seeds = 0;
  bool single_seed = false;  // CI half-width 0 by convention, flagged
  std::vector<double> per_seed_average;  // average return per seed (t-tests)
  std::vector<double> per_seed_final;    // final-point return per seed
};

/// Aggregates per-seed metrics CSVs (as written by the train runner).
/// Evaluation grids must match across seeds.
RunSummary aggregate(const std::vector<std::string>& metric_csv_paths);

/// Scans a directory for metrics_seed*.csv.
RunSummary aggregate_dir(const std::string& dir);

void write_summary_json(const std::string& path, const RunSummary& s);
/// gnuplot-friendly: "step mean lo hi" per line.
void write_curve_dat(const std::string& path, const RunSummary& s);

}  // namespace coex::harness

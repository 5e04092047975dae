#include "coex/harness/aggregate.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coex/harness/stats.hpp"
#include "coex/util/errors.hpp"

namespace coex::harness {

namespace {

struct SeedCurve {
  std::vector<std::uint64_t> steps;
  std::vector<double> returns;
};

SeedCurve read_metrics_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open metrics csv: " + path);
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty metrics csv: " + path);
  // header: step,eval_mean_return,...
  SeedCurve out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    out.steps.push_back(std::stoull(cell));
    std::getline(ss, cell, ',');
    out.returns.push_back(std::stod(cell));
  }
  if (out.steps.empty()) throw ConfigError("no rows in metrics csv: " + path);
  return out;
}

}  // namespace

RunSummary aggregate(const std::vector<std::string>& metric_csv_paths) {
  if (metric_csv_paths.empty()) throw ConfigError("no metrics files to aggregate");
  std::vector<SeedCurve> curves;
  curves.reserve(metric_csv_paths.size());
  for (const auto& p : metric_csv_paths) curves.push_back(read_metrics_csv(p));
  for (std::size_t s = 1; s < curves.size(); ++s) {
    if (curves[s].steps != curves[0].steps) {
      throw ConfigError("evaluation grids differ across seeds: " + metric_csv_paths[s]);
    }
  }
  RunSummary out;
  out.steps = curves[0].steps;
  out.n_seeds = curves.size();
  out.single_seed = curves.size() == 1;
  const std::size_t points = out.steps.size();
  out.mean.resize(points);
  out.lo.resize(points);
  out.hi.resize(points);
  std::vector<double> column(curves.size());
  for (std::size_t t = 0; t < points; ++t) {
    for (std::size_t s = 0; s < curves.size(); ++s) column[s] = curves[s].returns[t];
    const MeanCI ci = mean_ci95(column);
    out.mean[t] = ci.mean;
    out.lo[t] = ci.lo;
    out.hi[t] = ci.hi;
  }
  out.average_return = 0.0;
  for (double m : out.mean) out.average_return += m;
  out.average_return /= static_cast<double>(points);
  out.max_return = *std::max_element(out.mean.begin(), out.mean.end());
  for (const auto& c : curves) {
    double avg = 0.0;
    for (double r : c.returns) avg += r;
    out.per_seed_average.push_back(avg / static_cast<double>(points));
    out.per_seed_final.push_back(c.returns.back());
  }
  return out;
}

RunSummary aggregate_dir(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("metrics_seed", 0) == 0 && entry.path().extension() == ".csv") {
      files.push_back(entry.path().string());
    }
  }
  if (files.empty()) throw ConfigError("no metrics_seed*.csv files in " + dir);
  std::sort(files.begin(), files.end());
  return aggregate(files);
}

void write_summary_json(const std::string& path, const RunSummary& s) {
  nlohmann::json j;
  j["n_seeds"] = s.n_seeds;
  j["single_seed"] = s.single_seed;
  j["average_return"] = s.average_return;
  j["max_return"] = s.max_return;
  j["steps"] = s.steps;
  j["mean"] = s.mean;
  j["ci_lo"] = s.lo;
  j["ci_hi"] = s.hi;
  j["per_seed_average"] = s.per_seed_average;
  j["per_seed_final"] = s.per_seed_final;
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write summary json: " + path);
  os << j.dump(2) << '\n';
}

void write_curve_dat(const std::string& path, const RunSummary& s) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write curve file: " + path);
  os << "# step mean lo hi\n";
  os.precision(10);
  for (std::size_t t = 0; t < s.steps.size(); ++t) {
    os << s.steps[t] << ' ' << s.mean[t] << ' ' << s.lo[t] << ' ' << s.hi[t] << '\n';
  }
}

}  // namespace coex::harness

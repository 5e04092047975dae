#include "coex/harness/sweep.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "coex/harness/aggregate.hpp"
#include "coex/harness/config.hpp"
#include "coex/util/errors.hpp"

namespace coex::harness {

ProcessPool::ProcessPool(std::size_t max_parallel)
    : max_parallel_(std::max<std::size_t>(1, max_parallel)) {}

void ProcessPool::reap_one() {
  int status = 0;
  const pid_t pid = waitpid(-1, &status, 0);
  if (pid < 0) throw NumericalError("waitpid failed in worker pool");
  running_ -= 1;
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) all_ok_ = false;
}

void ProcessPool::submit(const std::vector<std::string>& argv) {
  while (running_ >= max_parallel_) reap_one();
  const pid_t pid = fork();
  if (pid < 0) throw NumericalError("fork failed in worker pool");
  if (pid == 0) {
    unsetenv("COEX_OUT_DIR");
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execv(cargv[0], cargv.data());
    _exit(127);  // exec failed
  }
  running_ += 1;
}

bool ProcessPool::wait_all() {
  while (running_ > 0) reap_one();
  return all_ok_;
}

std::string current_exe_path() {
  char buf[4096];
  const ssize_t len = readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (len <= 0) throw ConfigError("cannot resolve own executable path");
  buf[len] = '\0';
  return std::string(buf);
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

struct GridLine {
  std::string key;
  std::vector<std::string> values;  // > 1 entry means swept
};

std::vector<GridLine> parse_grid_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open grid file: " + path);
  std::vector<GridLine> lines;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    line_no += 1;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    GridLine gl;
    gl.key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    // the seed list is the per-cell seed set, never a sweep axis
    gl.values = gl.key == "seeds" ? std::vector<std::string>{value} : split_list(value);
    if (gl.values.empty()) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty value");
    }
    lines.push_back(std::move(gl));
  }
  if (lines.empty()) throw ConfigError("grid file is empty: " + path);
  return lines;
}

}  // namespace

SweepResult run_sweep(const std::string& grid_path, const std::string& out_root,
                      std::size_t max_procs) {
  const std::vector<GridLine> grid = parse_grid_file(grid_path);
  std::filesystem::create_directories(out_root);

  std::vector<std::size_t> swept;  // indices of swept lines
  std::size_t n_cells = 1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].values.size() > 1) {
      swept.push_back(i);
      n_cells *= grid[i].values.size();
    }
  }

  struct PendingCell {
    std::string name;
    std::string dir;
    std::string config_path;
    ExperimentSpec spec;
  };
  std::vector<PendingCell> cells;
  SweepResult result;

  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    // decode the cell's choice per swept axis
    std::vector<std::size_t> choice(swept.size(), 0);
    std::size_t rem = cell;
    for (std::size_t j = 0; j < swept.size(); ++j) {
      const std::size_t width = grid[swept[j]].values.size();
      choice[j] = rem % width;
      rem /= width;
    }
    std::string name = "cell" + std::to_string(cell);
    std::ostringstream config_text;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i].key == "out_dir") continue;  // assigned per cell below
      const auto it = std::find(swept.begin(), swept.end(), i);
      const std::string value =
          it == swept.end() ? grid[i].values[0]
                            : grid[i].values[choice[static_cast<std::size_t>(
                                  it - swept.begin())]];
      if (it != swept.end()) name += "_" + grid[i].key + value;
      config_text << grid[i].key << " = " << value << "\n";
    }
    const std::string dir = out_root + "/" + name;
    config_text << "out_dir = " << dir << "\n";

    ExperimentSpec spec = parse_config_text(config_text.str(), grid_path + "[" + name + "]");
    const bool all_zero = spec.cfg.c_act == 0.0 && spec.cfg.c_rew == 0.0 && spec.cfg.c_boot == 0.0;
    if (all_zero && spec.cfg.variant != marl::Variant::eps_greedy) {
      result.excluded.push_back(name);
      continue;
    }
    std::filesystem::create_directories(dir);
    const std::string config_path = dir + "/config.conf";
    std::ofstream os(config_path);
    os << config_text.str();
    if (!os) throw ConfigError("cannot write cell config: " + config_path);
    os.close();
    cells.push_back({name, dir, config_path, std::move(spec)});
  }
  if (cells.empty()) throw ConfigError("sweep grid produced no runnable cells");

  const std::string exe = current_exe_path();
  ProcessPool pool(max_procs);
  for (const auto& cell : cells) {
    for (std::uint64_t seed : cell.spec.seeds) {
      pool.submit({exe, "train", "--config", cell.config_path, "--seed", std::to_string(seed)});
    }
  }
  if (!pool.wait_all()) throw NumericalError("one or more sweep workers failed");

  for (const auto& cell : cells) {
    const RunSummary summary = aggregate_dir(cell.dir);
    write_summary_json(cell.dir + "/summary.json", summary);
    write_curve_dat(cell.dir + "/curve.dat", summary);
    SweepCell sc;
    sc.name = cell.name;
    sc.dir = cell.dir;
    sc.config_path = cell.config_path;
    sc.max_return = summary.max_return;
    sc.average_return = summary.average_return;
    result.ranking.push_back(std::move(sc));
  }
  std::stable_sort(result.ranking.begin(), result.ranking.end(),
                   [](const SweepCell& a, const SweepCell& b) {
                     return a.max_return > b.max_return;
                   });

  result.ranking_csv = out_root + "/ranking.csv";
  std::ofstream os(result.ranking_csv);
  if (!os) throw ConfigError("cannot write ranking: " + result.ranking_csv);
  os << "rank,cell,max_return,average_return,dir\n";
  os.precision(10);
  for (std::size_t r = 0; r < result.ranking.size(); ++r) {
    const auto& c = result.ranking[r];
    os << (r + 1) << ',' << c.name << ',' << c.max_return << ',' << c.average_return << ','
       << c.dir << '\n';
  }
  return result;
}

}  // namespace coex::harness

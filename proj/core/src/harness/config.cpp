#include "coex/harness/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "coex/envs/bernoulli_game.hpp"
#include "coex/envs/foraging.hpp"
#include "coex/util/errors.hpp"

namespace coex::harness {

void ExperimentSpec::validate() const {
  if (env_id.empty()) throw ConfigError("missing required key: env");
  cfg.validate();
  if (seeds.empty()) throw ConfigError("seed list must be non-empty");
  if (eval_interval == 0 || total_steps % eval_interval != 0) {
    throw ConfigError("eval_interval must divide total_steps");
  }
  if (eval_episodes == 0) throw ConfigError("eval_episodes must be >= 1");
  make_env(env_id);  // id must parse
}

namespace {

[[noreturn]] void fail_at(const std::string& origin, std::size_t line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& origin, std::size_t line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    fail_at(origin, line, "malformed number: " + v);
  }
}

std::uint64_t parse_u64(const std::string& origin, std::size_t line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long out = std::stoll(v, &pos);
    if (pos != v.size() || out < 0) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(out);
  } catch (const std::exception&) {
    fail_at(origin, line, "malformed non-negative integer: " + v);
  }
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

ExperimentSpec parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentSpec spec;
  std::istringstream is(text);
  std::string raw;
  std::size_t line_no = 0;
  std::vector<std::string> seen;
  while (std::getline(is, raw)) {
    line_no += 1;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail_at(origin, line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail_at(origin, line_no, "expected key = value");
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      fail_at(origin, line_no, "duplicate key: " + key);
    }
    seen.push_back(key);

    try {
      if (key == "env") {
        spec.env_id = value;
      } else if (key == "variant") {
        spec.cfg.variant = marl::parse_marl_variant(value);
      } else if (key == "c_act") {
        spec.cfg.c_act = parse_double(origin, line_no, value);
      } else if (key == "c_rew") {
        spec.cfg.c_rew = parse_double(origin, line_no, value);
      } else if (key == "c_boot") {
        spec.cfg.c_boot = parse_double(origin, line_no, value);
      } else if (key == "gamma") {
        spec.cfg.gamma = parse_double(origin, line_no, value);
      } else if (key == "lr") {
        spec.cfg.lr = parse_double(origin, line_no, value);
      } else if (key == "k") {
        spec.cfg.feature_bits = parse_u64(origin, line_no, value);
      } else if (key == "batch") {
        spec.cfg.batch_size = parse_u64(origin, line_no, value);
      } else if (key == "buffer") {
        spec.cfg.buffer_capacity = parse_u64(origin, line_no, value);
      } else if (key == "tau") {
        spec.cfg.tau = parse_double(origin, line_no, value);
      } else if (key == "total_steps") {
        spec.total_steps = parse_u64(origin, line_no, value);
      } else if (key == "eval_interval") {
        spec.eval_interval = parse_u64(origin, line_no, value);
      } else if (key == "eval_episodes") {
        spec.eval_episodes = parse_u64(origin, line_no, value);
      } else if (key == "seeds") {
        spec.seeds.clear();
        std::istringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
          spec.seeds.push_back(parse_u64(origin, line_no, trim(item)));
        }
        if (spec.seeds.empty()) fail_at(origin, line_no, "empty seed list");
      } else if (key == "epsilon_start") {
        spec.cfg.epsilon.start = parse_double(origin, line_no, value);
      } else if (key == "epsilon_end") {
        spec.cfg.epsilon.end = parse_double(origin, line_no, value);
      } else if (key == "epsilon_anneal") {
        spec.cfg.epsilon.anneal_steps = parse_u64(origin, line_no, value);
      } else if (key == "mixer") {
        spec.cfg.mixer = marl::parse_mixer(value);
      } else if (key == "out_dir") {
        spec.out_dir = value;
      } else {
        fail_at(origin, line_no, "unknown key: " + key);
      }
    } catch (const ConfigError& e) {
      // re-raise with position if the message lacks one
      const std::string what = e.what();
      if (what.rfind(origin, 0) == 0) throw;
      fail_at(origin, line_no, what);
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parse_config_text(buffer.str(), path);
}

std::unique_ptr<envs::Env> make_env(const std::string& env_id) {
  static const std::regex bernoulli_re(R"(bernoulli-(\d+)p-(\d+)a(?:-sub(0(?:\.\d+)?))?)");
  static const std::regex foraging_re(
      R"(foraging-(\d+)x(\d+)-(\d+)p-(\d+)f(?:-l(\d+))?(?:-t(\d+))?)");
  std::smatch m;
  if (std::regex_match(env_id, m, bernoulli_re)) {
    const std::size_t n = std::stoul(m[1]);
    const int k = std::stoi(m[2]);
    const double p0 = m[3].matched ? std::stod(m[3]) : 0.0;
    return std::make_unique<envs::BernoulliGame>(n, k, p0);
  }
  if (std::regex_match(env_id, m, foraging_re)) {
    envs::ForagingConfig cfg;
    cfg.width = std::stoi(m[1]);
    cfg.height = std::stoi(m[2]);
    cfg.n_agents = std::stoi(m[3]);
    cfg.n_foods = std::stoi(m[4]);
    if (m[5].matched) cfg.max_agent_level = std::stoi(m[5]);
    if (m[6].matched) cfg.episode_limit = std::stoi(m[6]);
    return std::make_unique<envs::ForagingEnv>(cfg);
  }
  throw ConfigError("unknown environment id: " + env_id);
}

std::string effective_out_dir(const std::string& configured) {
  const char* override_dir = std::getenv("COEX_OUT_DIR");
  return override_dir && *override_dir ? std::string(override_dir) : configured;
}

}  // namespace coex::harness

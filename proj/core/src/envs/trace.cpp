#include "coex/envs/trace.hpp"

#include <json.hpp>

#include "coex/util/errors.hpp"

namespace coex::envs {

TraceWriter::TraceWriter(const std::string& path) : out_(path) {
  if (!out_) throw ConfigError("cannot open trace file: " + path);
}

void TraceWriter::record(int t, std::span<const double> state, const JointAction& action,
                         double reward, bool done) {
  nlohmann::json j;
  j["t"] = t;
  j["state"] = std::vector<double>(state.begin(), state.end());
  j["joint_action"] = action;
  j["reward"] = reward;
  j["done"] = done;
  out_ << j.dump() << '\n';
}

}  // namespace coex::envs

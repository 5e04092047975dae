#pragma once

#include <fstream>
#include <span>
#include <string>

#include "coex/envs/env.hpp"

namespace coex::envs {

/// Episode transcript sink: one JSON object per line,
/// {t, state, joint_action, reward, done}.
class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path);
  void record(int t, std::span<const double> state, const JointAction& action, double reward,
              bool done);

 private:
  std::ofstream out_;
};

}  // namespace coex::envs

#pragma once

#include <stdexcept>

namespace coex {

/// Bad configuration, malformed input files, shape mismatches. Exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite losses or gradients during a run. Exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace coex

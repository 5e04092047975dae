#pragma once

// Central finite-difference oracles for gradient checks. Kept independent of
// the graph implementation: callers provide a plain double-valued function.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace coex::testing {

inline constexpr double kFdStep = 1e-5;

inline std::vector<double> fd_gradient(
    const std::function<double(std::span<const double>)>& f, std::vector<double> x,
    double h = kFdStep) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double fp = f(x);
    x[i] = x0 - h;
    const double fm = f(x);
    x[i] = x0;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// |a-b| relative to max(1, |a|, |b|).
inline double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline double max_rel_err(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_err(a[i], b[i]));
  return worst;
}

}  // namespace coex::testing

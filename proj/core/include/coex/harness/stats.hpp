#pragma once

#include <span>

namespace coex::harness {

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  double df = 0.0;
  bool significant = false;  // two-sided at 0.05
};

/// Welch's unequal-variance two-sample t-test with Welch-Satterthwaite
/// degrees of freedom and a two-sided p value. Sample sizes must be >= 2.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct MeanCI {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double half_width = 0.0;
};

/// Mean with a 95% confidence interval from the t distribution with n-1
/// degrees of freedom. A single value gets a zero half-width by convention.
MeanCI mean_ci95(std::span<const double> values);

/// Upper quantile of the t distribution (e.g. 0.975 for a 95% CI).
double t_quantile(double prob, double df);

}  // namespace coex::harness

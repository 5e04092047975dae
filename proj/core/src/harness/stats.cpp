#include "coex/harness/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "coex/util/errors.hpp"

namespace coex::harness {

namespace {

void mean_var(std::span<const double> x, double& mean, double& var) {
  mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size() - 1);
}

}  // namespace

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ConfigError("welch test needs >= 2 samples per side");
  double ma, va, mb, vb;
  mean_var(a, ma, va);
  mean_var(b, mb, vb);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = va / na;
  const double sb = vb / nb;
  TTestResult out;
  if (sa + sb <= 0.0) {
    // both samples degenerate: equal means are a non-result, different means
    // are separated by the variance clamp
    if (ma == mb) {
      out.t = 0.0;
      out.p = 1.0;
      out.df = na + nb - 2.0;
      out.significant = false;
      return out;
    }
    const double clamped = 1e-24;
    out.t = (ma - mb) / std::sqrt(clamped);
    out.df = na + nb - 2.0;
  } else {
    out.t = (ma - mb) / std::sqrt(sa + sb);
    out.df = (sa + sb) * (sa + sb) /
             (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  }
  boost::math::students_t_distribution<double> dist(out.df);
  out.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(out.t)));
  out.significant = out.p < 0.05;
  return out;
}

double t_quantile(double prob, double df) {
  boost::math::students_t_distribution<double> dist(df);
  return boost::math::quantile(dist, prob);
}

MeanCI mean_ci95(std::span<const double> values) {
  if (values.empty()) throw ConfigError("mean_ci95 on empty sample");
  MeanCI out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() == 1) {
    out.lo = out.hi = out.mean;
    return out;
  }
  double var = 0.0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  var /= static_cast<double>(values.size() - 1);
  const double se = std::sqrt(var / static_cast<double>(values.size()));
  const double tcrit = t_quantile(0.975, static_cast<double>(values.size() - 1));
  out.half_width = tcrit * se;
  out.lo = out.mean - out.half_width;
  out.hi = out.mean + out.half_width;
  return out;
}

}  // namespace coex::harness

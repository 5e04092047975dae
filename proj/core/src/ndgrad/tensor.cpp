#include "coex/ndgrad/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coex/util/errors.hpp"

namespace coex::nd {

namespace {
std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<std::size_t>());
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), values_(shape_numel(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_numel(shape_)) {
    throw ConfigError("tensor values length does not match shape");
  }
}

Tensor Tensor::row(std::vector<double> v) {
  std::size_t n = v.size();
  return Tensor({1, n}, std::move(v));
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

void gemm_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
              std::size_t p) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * p;
    for (std::size_t l = 0; l < k; ++l) {
      const double av = ai[l];
      const double* bl = b + l * p;
      for (std::size_t j = 0; j < p; ++j) ci[j] += av * bl[j];
    }
  }
}

void gemm_at_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t p) {
  // a is stored (k x m); result c is (m x p)
  for (std::size_t l = 0; l < k; ++l) {
    const double* al = a + l * m;
    const double* bl = b + l * p;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = al[i];
      double* ci = c + i * p;
      for (std::size_t j = 0; j < p; ++j) ci[j] += av * bl[j];
    }
  }
}

void gemm_bt_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t p) {
  // b is stored (p x k); result c is (m x p)
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * p;
    for (std::size_t j = 0; j < p; ++j) {
      const double* bj = b + j * k;
      double acc = 0.0;
      for (std::size_t l = 0; l < k; ++l) acc += ai[l] * bj[l];
      ci[j] += acc;
    }
  }
}

}  // namespace coex::nd

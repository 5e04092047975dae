#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace coex::nd {

/// Dense row-major tensor of doubles. Plain value type: copyable, no view
/// semantics. Gradients of tracked tensors live on graph nodes (same shape).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
  static Tensor scalar(double v) { return Tensor({1}, {v}); }
  /// 1 x n row matrix.
  static Tensor row(std::vector<double> v);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t numel() const { return values_.size(); }
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  // 2-D accessors; rank-1 tensors behave as a single row.
  std::size_t rows() const { return shape_.size() < 2 ? (shape_.empty() ? 0 : 1) : shape_[0]; }
  std::size_t cols() const {
    return shape_.size() < 2 ? (shape_.empty() ? 0 : shape_[0]) : shape_[1];
  }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  void fill(double v);
  bool all_finite() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
};

/// c(m x p) += a(m x k) * b(k x p). The one hot loop in the project; keep the
/// inner dimension unit-stride.
void gemm_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
              std::size_t p);

/// c(m x p) += a^T(m x k, stored k x m) * b(k x p).
void gemm_at_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t p);

/// c(m x p) += a(m x k) * b^T(k x p, stored p x k).
void gemm_bt_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t p);

}  // namespace coex::nd

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "coex/ndgrad/tensor.hpp"

namespace coex::nd {

enum class OptimRule { sgd, adam };

/// Named parameter tensors plus per-parameter optimizer state (first/second
/// moment accumulators, used by the adaptive rule only).
class ParamSet {
 public:
  struct Entry {
    Tensor value;
    Tensor m1;
    Tensor m2;
  };

  Tensor& add(const std::string& name, Tensor init);
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  bool contains(const std::string& name) const { return entries_.count(name) > 0; }
  std::size_t size() const { return entries_.size(); }

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Deep copy of values only; optimizer state starts fresh.
  ParamSet clone_values() const;

  std::uint64_t adam_steps = 0;

 private:
  std::map<std::string, Entry> entries_;
};

using GradMap = std::map<std::string, Tensor>;

struct OptimConfig {
  OptimRule rule = OptimRule::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One update of every parameter that has a gradient in `grads`.
/// Throws NumericalError on any non-finite gradient.
void optimizer_step(ParamSet& params, const GradMap& grads, double lr,
                    const OptimConfig& opt = {});

/// target <- tau * online + (1 - tau) * target, elementwise over all tensors.
void soft_update(ParamSet& target, const ParamSet& online, double tau);

/// Uniform init in +-1/sqrt(fan_in).
Tensor init_uniform(std::vector<std::size_t> shape, std::size_t fan_in, std::mt19937_64& rng);

}  // namespace coex::nd

#include "coex/ndgrad/params.hpp"

#include <cmath>

#include "coex/util/errors.hpp"

namespace coex::nd {

Tensor& ParamSet::add(const std::string& name, Tensor init) {
  if (contains(name)) throw ConfigError("duplicate parameter name: " + name);
  Entry e;
  e.m1 = Tensor::zeros(init.shape());
  e.m2 = Tensor::zeros(init.shape());
  e.value = std::move(init);
  return entries_.emplace(name, std::move(e)).first->second.value;
}

Tensor& ParamSet::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown parameter: " + name);
  return it->second.value;
}

const Tensor& ParamSet::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown parameter: " + name);
  return it->second.value;
}

ParamSet ParamSet::clone_values() const {
  ParamSet out;
  for (const auto& [name, entry] : entries_) out.add(name, entry.value);
  return out;
}

void optimizer_step(ParamSet& params, const GradMap& grads, double lr, const OptimConfig& opt) {
  if (opt.rule == OptimRule::adam) params.adam_steps += 1;
  for (auto& [name, entry] : params) {
    auto git = grads.find(name);
    if (git == grads.end()) continue;
    const Tensor& g = git->second;
    if (!g.same_shape(entry.value)) throw ConfigError("gradient shape mismatch for " + name);
    if (!g.all_finite()) throw NumericalError("non-finite gradient for parameter " + name);
    const std::size_t n = g.numel();
    switch (opt.rule) {
      case OptimRule::sgd:
        for (std::size_t i = 0; i < n; ++i) entry.value[i] -= lr * g[i];
        break;
      case OptimRule::adam: {
        const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(params.adam_steps));
        const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(params.adam_steps));
        for (std::size_t i = 0; i < n; ++i) {
          entry.m1[i] = opt.beta1 * entry.m1[i] + (1.0 - opt.beta1) * g[i];
          entry.m2[i] = opt.beta2 * entry.m2[i] + (1.0 - opt.beta2) * g[i] * g[i];
          const double mhat = entry.m1[i] / bc1;
          const double vhat = entry.m2[i] / bc2;
          entry.value[i] -= lr * mhat / (std::sqrt(vhat) + opt.eps);
        }
        break;
      }
    }
  }
}

void soft_update(ParamSet& target, const ParamSet& online, double tau) {
  if (tau < 0.0 || tau > 1.0) throw ConfigError("soft_update: tau out of [0,1]");
  for (auto& [name, entry] : target) {
    const Tensor& src = online.at(name);
    if (!src.same_shape(entry.value)) throw ConfigError("soft_update shape mismatch: " + name);
    for (std::size_t i = 0; i < entry.value.numel(); ++i) {
      entry.value[i] = tau * src[i] + (1.0 - tau) * entry.value[i];
    }
  }
}

Tensor init_uniform(std::vector<std::size_t> shape, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in == 0 ? 1 : fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = dist(rng);
  return t;
}

}  // namespace coex::nd

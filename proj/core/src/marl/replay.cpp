#include "coex/marl/replay.hpp"

#include <algorithm>
#include <cmath>

#include "coex/util/errors.hpp"

namespace coex::marl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
  storage_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayBuffer::push(Transition t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[write_] = std::move(t);
  }
  write_ = (write_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch,
                                                      std::mt19937_64& rng) const {
  std::uniform_int_distribution<std::size_t> dist(0, storage_.size() - 1);
  std::vector<std::size_t> out(batch);
  for (auto& i : out) i = dist(rng);
  return out;
}

void RewardStats::observe(double r) {
  n_ += 1;
  const double delta = r - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (r - mean_);
}

double RewardStats::stddev() const {
  if (n_ == 0) return 1e-6;
  const double var = m2_ / static_cast<double>(n_);
  return std::max(std::sqrt(var), 1e-6);
}

double RewardStats::standardize(double r) {
  observe(r);
  return r / stddev();
}

}  // namespace coex::marl

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace coex::counting {

/// Sign pattern of a random projection, packed little-endian: bit i is set
/// iff row i of the projection is nonnegative. At most 64 feature bits.
using HashKey = std::uint64_t;

/// Maps a raw global state to a countable key.
class StateHasher {
 public:
  virtual ~StateHasher() = default;
  virtual HashKey project(std::span<const double> state) const = 0;
};

/// Static hashing: key = sgn(A g(s)) with A (k x D), entries i.i.d. unit
/// normal drawn once at construction. sign(0) counts as +1.
class SimHashProjector final : public StateHasher {
 public:
  using Preprocess = std::function<std::vector<double>(std::span<const double>)>;

  SimHashProjector(std::size_t feature_bits, std::size_t state_dim, std::uint64_t seed,
                   Preprocess preprocess = nullptr);
  /// Explicit matrix, row-major (feature_bits x state_dim). For tests.
  SimHashProjector(std::size_t feature_bits, std::size_t state_dim, std::vector<double> matrix,
                   Preprocess preprocess = nullptr);

  HashKey project(std::span<const double> state) const override;

  std::size_t feature_bits() const { return bits_; }
  std::size_t state_dim() const { return dim_; }

 private:
  std::size_t bits_;
  std::size_t dim_;
  std::vector<double> matrix_;  // row-major bits_ x dim_
  Preprocess preprocess_;
};

/// Exact-state keys for small discrete state encodings; bypasses SimHash so
/// oracle tests can count true states.
class ExactHasher final : public StateHasher {
 public:
  HashKey project(std::span<const double> state) const override;
};

std::unique_ptr<StateHasher> make_hasher(bool exact, std::size_t feature_bits,
                                         std::size_t state_dim, std::uint64_t seed);

}  // namespace coex::counting

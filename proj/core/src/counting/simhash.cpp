#include "coex/counting/simhash.hpp"

#include <cstring>
#include <random>

#include "coex/util/errors.hpp"
#include "coex/util/rng.hpp"

namespace coex::counting {

SimHashProjector::SimHashProjector(std::size_t feature_bits, std::size_t state_dim,
                                   std::uint64_t seed, Preprocess preprocess)
    : bits_(feature_bits), dim_(state_dim), preprocess_(std::move(preprocess)) {
  if (bits_ == 0 || bits_ > 64) throw ConfigError("feature bits must be in 1..64");
  if (dim_ == 0) throw ConfigError("state dimension must be positive");
  auto rng = make_rng(seed, Stream::projector);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  matrix_.resize(bits_ * dim_);
  for (double& a : matrix_) a = unit_normal(rng);
}

SimHashProjector::SimHashProjector(std::size_t feature_bits, std::size_t state_dim,
                                   std::vector<double> matrix, Preprocess preprocess)
    : bits_(feature_bits), dim_(state_dim), matrix_(std::move(matrix)),
      preprocess_(std::move(preprocess)) {
  if (bits_ == 0 || bits_ > 64) throw ConfigError("feature bits must be in 1..64");
  if (matrix_.size() != bits_ * dim_) throw ConfigError("projection matrix shape mismatch");
}

HashKey SimHashProjector::project(std::span<const double> state) const {
  std::vector<double> buf;
  std::span<const double> s = state;
  if (preprocess_) {
    buf = preprocess_(state);
    s = buf;
  }
  if (s.size() != dim_) throw ConfigError("state dimension does not match projector");
  HashKey key = 0;
  for (std::size_t i = 0; i < bits_; ++i) {
    const double* row = matrix_.data() + i * dim_;
    double acc = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) acc += row[j] * s[j];
    if (acc >= 0.0) key |= HashKey{1} << i;  // sign(0) = +1
  }
  return key;
}

HashKey ExactHasher::project(std::span<const double> state) const {
  // FNV-1a over the raw bytes; states here are discrete encodings, so equal
  // states are bitwise equal.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : state) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::unique_ptr<StateHasher> make_hasher(bool exact, std::size_t feature_bits,
                                         std::size_t state_dim, std::uint64_t seed) {
  if (exact) return std::make_unique<ExactHasher>();
  return std::make_unique<SimHashProjector>(feature_bits, state_dim, seed);
}

}  // namespace coex::counting

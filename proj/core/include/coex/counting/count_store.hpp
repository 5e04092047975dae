#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "coex/counting/simhash.hpp"

namespace coex::counting {

/// Optimism bonus of the tree-style selection rule: c * sqrt(2 ln(parent) / child).
/// Unvisited children (count 0) are infinitely attractive; a zero scale
/// disables the bonus entirely, taking precedence over the unvisited case.
inline double ucb_bonus(double c, std::uint64_t parent, std::uint64_t child) {
  if (c == 0.0) return 0.0;
  if (child == 0) return std::numeric_limits<double>::infinity();
  const double p = parent < 1 ? 1.0 : static_cast<double>(parent);
  return c * std::sqrt(2.0 * std::log(p) / static_cast<double>(child));
}

/// Count-decaying bonus c / sqrt(count), with the count clamped to >= 1:
/// targets may be evaluated at hashed states that were never stored.
inline double sqrt_bonus(double c, std::uint64_t count) {
  if (c == 0.0) return 0.0;
  return c / std::sqrt(static_cast<double>(count < 1 ? 1 : count));
}

/// Visitation counts over (hashed state, action prefix), one table per
/// prefix length 0..n. Incrementing a full joint action bumps all n+1
/// prefixes, which keeps the prefix-sum identity
///   count(key, prefix) == sum over a of count(key, prefix + a)
/// exact at every level while queries stay O(1).
class CountStore {
 public:
  CountStore(std::size_t n_agents, std::size_t actions_per_agent);

  void increment(HashKey key, std::span<const int> joint_action);
  std::uint64_t count(HashKey key, std::span<const int> prefix) const;
  /// Total visits of the hashed state (prefix length 0).
  std::uint64_t state_count(HashKey key) const { return count(key, {}); }

  std::size_t n_agents() const { return n_; }
  std::size_t actions_per_agent() const { return k_; }
  /// Number of distinct hashed states seen.
  std::size_t distinct_keys() const { return tables_[0].size(); }
  /// Total number of stored (key, prefix) entries across all tables.
  std::size_t entry_count() const;

  /// Debug dump, one JSON object per entry: {key_bits, prefix, count}.
  void dump_json(std::ostream& os) const;

 private:
  struct PrefixKey {
    HashKey key;
    std::uint64_t packed;
    bool operator==(const PrefixKey&) const = default;
  };
  struct PrefixKeyHash {
    std::size_t operator()(const PrefixKey& p) const;
  };
  using Table = std::unordered_map<PrefixKey, std::uint64_t, PrefixKeyHash>;

  std::uint64_t pack(std::span<const int> prefix) const;

  std::size_t n_;
  std::size_t k_;
  std::vector<Table> tables_;  // index = prefix length
};

}  // namespace coex::counting

#include "coex/counting/count_store.hpp"

#include <ostream>

#include "coex/util/errors.hpp"
#include "coex/util/rng.hpp"

namespace coex::counting {

std::size_t CountStore::PrefixKeyHash::operator()(const PrefixKey& p) const {
  return static_cast<std::size_t>(mix64(p.key ^ mix64(p.packed)));
}

CountStore::CountStore(std::size_t n_agents, std::size_t actions_per_agent)
    : n_(n_agents), k_(actions_per_agent), tables_(n_agents + 1) {
  if (n_ == 0 || k_ == 0) throw ConfigError("count store needs agents and actions");
  // packed prefixes must fit in 64 bits
  double bits = static_cast<double>(n_) * std::log2(static_cast<double>(k_));
  if (bits > 63.0) throw ConfigError("joint action space too large to pack");
}

std::uint64_t CountStore::pack(std::span<const int> prefix) const {
  std::uint64_t packed = 0;
  std::uint64_t mult = 1;
  for (int a : prefix) {
    if (a < 0 || static_cast<std::size_t>(a) >= k_) {
      throw ConfigError("action index out of range in count store");
    }
    packed += mult * static_cast<std::uint64_t>(a);
    mult *= k_;
  }
  return packed;
}

void CountStore::increment(HashKey key, std::span<const int> joint_action) {
  if (joint_action.size() != n_) throw ConfigError("joint action length mismatch");
  std::uint64_t packed = 0;
  std::uint64_t mult = 1;
  tables_[0][PrefixKey{key, 0}] += 1;
  for (std::size_t len = 1; len <= n_; ++len) {
    const int a = joint_action[len - 1];
    if (a < 0 || static_cast<std::size_t>(a) >= k_) {
      throw ConfigError("action index out of range in count store");
    }
    packed += mult * static_cast<std::uint64_t>(a);
    mult *= k_;
    tables_[len][PrefixKey{key, packed}] += 1;
  }
}

std::uint64_t CountStore::count(HashKey key, std::span<const int> prefix) const {
  if (prefix.size() > n_) throw ConfigError("prefix longer than agent count");
  const Table& table = tables_[prefix.size()];
  auto it = table.find(PrefixKey{key, pack(prefix)});
  return it == table.end() ? 0 : it->second;
}

std::size_t CountStore::entry_count() const {
  std::size_t total = 0;
  for (const Table& t : tables_) total += t.size();
  return total;
}

void CountStore::dump_json(std::ostream& os) const {
  for (std::size_t len = 0; len < tables_.size(); ++len) {
    for (const auto& [pk, cnt] : tables_[len]) {
      os << "{\"key_bits\":" << pk.key << ",\"prefix\":[";
      std::uint64_t packed = pk.packed;
      for (std::size_t i = 0; i < len; ++i) {
        os << (i ? "," : "") << packed % k_;
        packed /= k_;
      }
      os << "],\"count\":" << cnt << "}\n";
    }
  }
}

}  // namespace coex::counting

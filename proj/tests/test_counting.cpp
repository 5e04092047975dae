#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "coex/counting/count_store.hpp"
#include "coex/counting/simhash.hpp"
#include "coex/util/errors.hpp"

using namespace coex;
using counting::CountStore;
using counting::HashKey;
using counting::SimHashProjector;

namespace {

// Brute-force prefix counts recomputed from raw increment logs: the oracle
// for the prefix-sum identity.
struct BruteCounts {
  std::map<std::pair<HashKey, std::vector<int>>, std::uint64_t> table;

  void increment(HashKey key, const std::vector<int>& action) {
    for (std::size_t len = 0; len <= action.size(); ++len) {
      table[{key, std::vector<int>(action.begin(), action.begin() + len)}] += 1;
    }
  }
};

std::vector<double> random_unit(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0.0;
  for (auto& x : v) {
    x = n(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

}  // namespace

TEST_SUITE("counting") {

TEST_CASE("identity projection takes coordinate signs, sign(0) = +1") {
  // A = I (k = D = 2)
  SimHashProjector p(2, 2, std::vector<double>{1.0, 0.0, 0.0, 1.0});
  const std::vector<double> s{0.5, -2.0};
  const HashKey key = p.project(s);
  CHECK((key & 1) == 1);  // +1
  CHECK((key >> 1 & 1) == 0);  // -1

  const std::vector<double> zero{0.0, 0.0};
  CHECK(p.project(zero) == 0b11);  // sign of exactly 0 is +1

  CHECK(p.project(s) == p.project(s));
}

TEST_CASE("seeded projector is reproducible and dimension-checked") {
  SimHashProjector a(8, 5, 42);
  SimHashProjector b(8, 5, 42);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const std::vector<double> s = random_unit(5, rng);
    CHECK(a.project(s) == b.project(s));
  }
  const std::vector<double> wrong(4, 0.0);
  CHECK_THROWS_AS(a.project(wrong), ConfigError);
}

TEST_CASE("angular locality: bit-agreement rate tracks 1 - theta/pi") {
  SimHashProjector p(8, 6, 7);
  std::mt19937_64 rng(123);
  const double theta = 3.14159265358979323846 / 2.0;  // right angle -> 0.5
  std::size_t agree = 0, total = 0;
  for (int rep = 0; rep < 3000; ++rep) {
    const std::vector<double> u = random_unit(6, rng);
    std::vector<double> w = random_unit(6, rng);
    double dot = 0.0;
    for (std::size_t i = 0; i < 6; ++i) dot += u[i] * w[i];
    double norm = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      w[i] -= dot * u[i];
      norm += w[i] * w[i];
    }
    norm = std::sqrt(norm);
    std::vector<double> v(6);
    for (std::size_t i = 0; i < 6; ++i) {
      v[i] = std::cos(theta) * u[i] + std::sin(theta) * w[i] / norm;
    }
    const HashKey ku = p.project(u);
    const HashKey kv = p.project(v);
    for (std::size_t bit = 0; bit < 8; ++bit) {
      agree += ((ku >> bit) & 1) == ((kv >> bit) & 1) ? 1 : 0;
      total += 1;
    }
  }
  const double rate = static_cast<double>(agree) / static_cast<double>(total);
  CHECK(rate == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("increment and count: examples") {
  CountStore store(3, 4);
  const HashKey key = 0xBEEF;
  CHECK(store.count(key, std::vector<int>{}) == 0);  // empty store

  store.increment(key, std::vector<int>{1, 2, 3});
  CHECK(store.count(key, std::vector<int>{1, 2, 3}) == 1);
  CHECK(store.count(key, std::vector<int>{}) == 1);

  // two increments sharing (a1) but differing a2
  store.increment(key, std::vector<int>{1, 0, 3});
  CHECK(store.count(key, std::vector<int>{1}) == 2);
  CHECK(store.count(key, std::vector<int>{1, 2}) == 1);
  CHECK(store.count(key, std::vector<int>{1, 0}) == 1);
  CHECK(store.count(key, std::vector<int>{1, 2, 3}) == 1);
  CHECK(store.count(key, std::vector<int>{1, 0, 3}) == 1);

  // total-count identity
  store.increment(key, std::vector<int>{0, 0, 0});
  CHECK(store.count(key, std::vector<int>{}) == 3);
}

TEST_CASE("prefix-sum identity holds exactly after 1000 random increments") {
  const std::size_t n = 4;
  const std::size_t k = 3;
  CountStore store(n, k);
  BruteCounts oracle;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> action(0, static_cast<int>(k) - 1);
  std::uniform_int_distribution<int> key_pick(0, 9);
  for (int i = 0; i < 1000; ++i) {
    const HashKey key = static_cast<HashKey>(key_pick(rng));
    std::vector<int> a(n);
    for (auto& x : a) x = action(rng);
    store.increment(key, a);
    oracle.increment(key, a);
  }
  // every stored prefix equals the brute-force count, and the identity
  // count(prefix) = sum_a count(prefix + a) holds at every level
  for (const auto& [pk, cnt] : oracle.table) {
    CHECK(store.count(pk.first, pk.second) == cnt);
    if (pk.second.size() < n) {
      std::uint64_t child_sum = 0;
      for (int a = 0; a < static_cast<int>(k); ++a) {
        std::vector<int> ext = pk.second;
        ext.push_back(a);
        child_sum += store.count(pk.first, ext);
      }
      CHECK(store.count(pk.first, pk.second) == child_sum);
    }
  }
}

TEST_CASE("store size is bounded by (n+1) x distinct full pairs") {
  const std::size_t n = 3;
  CountStore store(n, 2);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> bit(0, 1);
  std::set<std::pair<HashKey, std::vector<int>>> distinct;
  for (int i = 0; i < 500; ++i) {
    const HashKey key = static_cast<HashKey>(bit(rng));
    std::vector<int> a{bit(rng), bit(rng), bit(rng)};
    store.increment(key, a);
    distinct.insert({key, a});
  }
  CHECK(store.entry_count() <= (n + 1) * distinct.size());
}

TEST_CASE("ucb_bonus closed-form values and conventions") {
  CHECK(counting::ucb_bonus(1.0, 1, 1) == 0.0);  // ln 1 = 0
  CHECK(std::isinf(counting::ucb_bonus(1.0, 5, 0)));
  CHECK(std::isinf(counting::ucb_bonus(0.5, 0, 0)));
  CHECK(counting::ucb_bonus(0.0, 5, 0) == 0.0);  // zero scale wins
  // c = 1, parent = e^2, child = 2 -> sqrt(2)
  const double e2 = std::exp(2.0);
  CHECK(counting::ucb_bonus(1.0, static_cast<std::uint64_t>(std::llround(e2)), 2) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-2));
  // exact form with a real-valued parent check via logs
  CHECK(counting::ucb_bonus(1.0, 7, 2) ==
        doctest::Approx(std::sqrt(2.0 * std::log(7.0) / 2.0)));
}

TEST_CASE("ucb_bonus monotonicity in child and parent") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::uint64_t> parent_dist(2, 1000);
  for (int rep = 0; rep < 200; ++rep) {
    const std::uint64_t parent = parent_dist(rng);
    std::uniform_int_distribution<std::uint64_t> child_dist(1, parent - 1);
    const std::uint64_t child = child_dist(rng);
    // strictly decreasing in child
    CHECK(counting::ucb_bonus(0.7, parent, child) > counting::ucb_bonus(0.7, parent, child + 1));
    // nondecreasing in parent (parent >= 1)
    CHECK(counting::ucb_bonus(0.7, parent + 1, child) >=
          counting::ucb_bonus(0.7, parent, child));
  }
}

TEST_CASE("sqrt_bonus values and the count clamp") {
  CHECK(counting::sqrt_bonus(0.05, 1) == doctest::Approx(0.05));
  CHECK(counting::sqrt_bonus(0.05, 4) == doctest::Approx(0.025));
  CHECK(counting::sqrt_bonus(0.0, 123) == 0.0);
  CHECK(counting::sqrt_bonus(0.05, 0) == doctest::Approx(0.05));  // clamp at 1
}

TEST_CASE("count table dumps as JSON lines") {
  CountStore store(2, 2);
  store.increment(0x1, std::vector<int>{1, 0});
  std::ostringstream os;
  store.dump_json(os);
  std::istringstream is(os.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(is, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("key_bits"));
    CHECK(j.contains("prefix"));
    CHECK(j.contains("count"));
    lines += 1;
  }
  CHECK(lines == 3);  // prefix lengths 0, 1, 2
}

}  // TEST_SUITE

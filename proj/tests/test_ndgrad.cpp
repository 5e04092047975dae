#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>

#include "coex/ndgrad/checkpoint.hpp"
#include "coex/ndgrad/graph.hpp"
#include "coex/ndgrad/params.hpp"
#include "coex/util/errors.hpp"
#include "support/finite_diff.hpp"

using namespace coex;
using coex::testing::fd_gradient;
using coex::testing::max_rel_err;

namespace {

nd::Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng, double lo = -1.0,
                         double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  nd::Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = dist(rng);
  return t;
}

// entries with |x| in [0.1, 2]: finite differences stay away from kinks
nd::Tensor random_tensor_away_from_zero(std::vector<std::size_t> shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.1, 2.0);
  std::bernoulli_distribution sign(0.5);
  nd::Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = (sign(rng) ? 1.0 : -1.0) * mag(rng);
  return t;
}

// Generic op gradient check: builds loss = mse(op(inputs), target) and
// compares every input gradient against central finite differences.
using BuildFn = std::function<nd::Var(nd::Graph&, const std::vector<nd::Var>&)>;

double check_op_grads(const std::vector<nd::Tensor>& inputs, const nd::Tensor& target,
                      const BuildFn& build) {
  auto eval = [&](const std::vector<nd::Tensor>& ins, std::vector<std::vector<double>>* grads) {
    nd::Graph g;
    std::vector<nd::Var> vars;
    vars.reserve(ins.size());
    for (const auto& t : ins) vars.push_back(g.leaf(t, /*tracked=*/true));
    nd::Var loss = g.mse(build(g, vars), target);
    if (grads) {
      g.backward(loss);
      grads->clear();
      for (nd::Var v : vars) {
        const nd::Tensor& gt = g.grad(v);
        grads->emplace_back(gt.data(), gt.data() + gt.numel());
      }
    }
    return g.scalar_value(loss);
  };

  std::vector<std::vector<double>> analytic;
  eval(inputs, &analytic);

  double worst = 0.0;
  std::vector<nd::Tensor> perturbed = inputs;
  for (std::size_t block = 0; block < inputs.size(); ++block) {
    auto f = [&](std::span<const double> x) {
      for (std::size_t i = 0; i < x.size(); ++i) perturbed[block][i] = x[i];
      const double l = eval(perturbed, nullptr);
      for (std::size_t i = 0; i < x.size(); ++i) perturbed[block][i] = inputs[block][i];
      return l;
    };
    std::vector<double> x(inputs[block].data(), inputs[block].data() + inputs[block].numel());
    const std::vector<double> numeric = fd_gradient(f, x);
    worst = std::max(worst, max_rel_err(analytic[block], numeric));
  }
  return worst;
}

}  // namespace

TEST_SUITE("ndgrad") {

TEST_CASE("affine identity and zero-input cases") {
  nd::Graph g;
  nd::Var x = g.constant(nd::Tensor({1, 2}, {1.5, -2.0}));
  nd::Var w = g.constant(nd::Tensor({2, 2}, {1.0, 0.0, 0.0, 1.0}));
  nd::Var b = g.constant(nd::Tensor({2}, {0.0, 0.0}));
  nd::Var y = g.affine(x, w, b);
  CHECK(g.value(y)[0] == doctest::Approx(1.5));
  CHECK(g.value(y)[1] == doctest::Approx(-2.0));

  nd::Var x0 = g.constant(nd::Tensor({1, 2}, {0.0, 0.0}));
  nd::Var b2 = g.constant(nd::Tensor({2}, {0.7, -0.3}));
  nd::Var y2 = g.affine(x0, w, b2);
  CHECK(g.value(y2)[0] == doctest::Approx(0.7));
  CHECK(g.value(y2)[1] == doctest::Approx(-0.3));
}

TEST_CASE("affine shape mismatch is a configuration error") {
  nd::Graph g;
  nd::Var x = g.constant(nd::Tensor({1, 3}));
  nd::Var w = g.constant(nd::Tensor({2, 2}));
  nd::Var b = g.constant(nd::Tensor({2}));
  CHECK_THROWS_AS(g.affine(x, w, b), ConfigError);
}

TEST_CASE("affine gradients match finite differences on a random 3x4 layer") {
  std::mt19937_64 rng(7);
  const nd::Tensor x = random_tensor({2, 3}, rng);
  const nd::Tensor w = random_tensor({3, 4}, rng);
  const nd::Tensor b = random_tensor({4}, rng);
  const nd::Tensor target = random_tensor({2, 4}, rng);
  const double err = check_op_grads({x, w, b}, target, [](nd::Graph& g, const auto& v) {
    return g.affine(v[0], v[1], v[2]);
  });
  CHECK(err < 1e-4);
}

TEST_CASE("activations: forward values and kink conventions") {
  nd::Graph g;
  nd::Var x = g.leaf(nd::Tensor({1, 3}, {-1.0, 0.0, 2.0}), true);
  nd::Var r = g.activation(x, nd::Act::relu);
  CHECK(g.value(r)[0] == 0.0);
  CHECK(g.value(r)[1] == 0.0);
  CHECK(g.value(r)[2] == 2.0);

  nd::Graph g2;
  nd::Var xa = g2.leaf(nd::Tensor({1, 2}, {-3.0, 0.0}), true);
  nd::Var ya = g2.activation(xa, nd::Act::abs);
  CHECK(g2.value(ya)[0] == 3.0);
  nd::Var loss = g2.mse(ya, nd::Tensor({1, 2}, {0.0, 0.0}));
  g2.backward(loss);
  // d/dx |x| at -3 is -1 (surfaced through the mse chain), exactly 0 at 0
  CHECK(g2.grad(xa)[0] == doctest::Approx(2.0 / 2.0 * 3.0 * -1.0));
  CHECK(g2.grad(xa)[1] == 0.0);
}

TEST_CASE("elu gradient at 0.7 and every activation against finite differences") {
  std::mt19937_64 rng(21);
  for (nd::Act act : {nd::Act::relu, nd::Act::elu, nd::Act::abs}) {
    const nd::Tensor x = random_tensor_away_from_zero({2, 4}, rng);
    const nd::Tensor target = random_tensor({2, 4}, rng);
    const double err = check_op_grads({x}, target, [act](nd::Graph& g, const auto& v) {
      return g.activation(v[0], act);
    });
    CHECK(err < 1e-4);
  }
  // the named point x = 0.7
  const nd::Tensor x07({1, 1}, {0.7});
  const double err = check_op_grads({x07}, nd::Tensor({1, 1}, {0.0}),
                                    [](nd::Graph& g, const auto& v) {
                                      return g.activation(v[0], nd::Act::elu);
                                    });
  CHECK(err < 1e-4);
}

TEST_CASE("mse values and gradient") {
  nd::Graph g;
  nd::Var p = g.leaf(nd::Tensor({1, 2}, {1.0, 3.0}), true);
  nd::Var l_eq = g.mse(p, nd::Tensor({1, 2}, {1.0, 3.0}));
  CHECK(g.scalar_value(l_eq) == 0.0);
  nd::Var l = g.mse(p, nd::Tensor({1, 2}, {0.0, 1.0}));
  CHECK(g.scalar_value(l) == doctest::Approx(2.5));  // (1+4)/2
  g.backward(l);
  // 2(pred_i - target_i)/n
  CHECK(g.grad(p)[0] == doctest::Approx(2.0 * 1.0 / 2.0));
  CHECK(g.grad(p)[1] == doctest::Approx(2.0 * 2.0 / 2.0));

  CHECK_THROWS_AS(g.mse(p, nd::Tensor({1, 3})), ConfigError);
}

TEST_CASE("every primitive op passes finite-difference checks on random inputs") {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    worst = std::max(worst, check_op_grads({random_tensor({2, 3}, rng),
                                            random_tensor({3, 4}, rng)},
                                           random_tensor({2, 4}, rng),
                                           [](nd::Graph& g, const auto& v) {
                                             return g.matmul(v[0], v[1]);
                                           }));
    worst = std::max(worst, check_op_grads({random_tensor({2, 4}, rng),
                                            random_tensor({2, 4}, rng)},
                                           random_tensor({2, 4}, rng),
                                           [](nd::Graph& g, const auto& v) {
                                             return g.add(v[0], v[1]);
                                           }));
    worst = std::max(worst, check_op_grads({random_tensor({2, 4}, rng),
                                            random_tensor({2, 4}, rng)},
                                           random_tensor({2, 4}, rng),
                                           [](nd::Graph& g, const auto& v) {
                                             return g.sub(v[0], v[1]);
                                           }));
    worst = std::max(worst, check_op_grads({random_tensor({2, 4}, rng),
                                            random_tensor({2, 4}, rng)},
                                           random_tensor({2, 4}, rng),
                                           [](nd::Graph& g, const auto& v) {
                                             return g.mul(v[0], v[1]);
                                           }));
    worst = std::max(worst, check_op_grads({random_tensor({2, 4}, rng)},
                                           random_tensor({2, 1}, rng),
                                           [](nd::Graph& g, const auto& v) {
                                             return g.rowsum(v[0]);
                                           }));
    worst = std::max(worst, check_op_grads({random_tensor({2, 4}, rng)},
                                           random_tensor({2, 4}, rng),
                                           [](nd::Graph& g, const auto& v) {
                                             return g.scale(v[0], -1.7);
                                           }));
    worst = std::max(worst,
                     check_op_grads({random_tensor({3, 4}, rng)}, random_tensor({3, 1}, rng),
                                    [](nd::Graph& g, const auto& v) {
                                      return g.gather_cols(v[0], {2, 0, 3});
                                    }));
    worst = std::max(worst, check_op_grads({random_tensor({2, 2}, rng),
                                            random_tensor({2, 3}, rng)},
                                           random_tensor({2, 5}, rng),
                                           [](nd::Graph& g, const auto& v) {
                                             return g.hstack({v[0], v[1]});
                                           }));
    worst = std::max(worst, check_op_grads({random_tensor({2, 3}, rng),
                                            random_tensor({2, 12}, rng)},
                                           random_tensor({2, 4}, rng),
                                           [](nd::Graph& g, const auto& v) {
                                             return g.bmm_vec_mat(v[0], v[1], 3, 4);
                                           }));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("forward pass is bit-deterministic") {
  std::mt19937_64 rng(3);
  const nd::Tensor x = random_tensor({4, 6}, rng);
  const nd::Tensor w = random_tensor({6, 5}, rng);
  const nd::Tensor b = random_tensor({5}, rng);
  auto run = [&]() {
    nd::Graph g;
    nd::Var y = g.activation(g.affine(g.constant(x), g.constant(w), g.constant(b)),
                             nd::Act::elu);
    const nd::Tensor& v = g.value(y);
    return std::vector<double>(v.data(), v.data() + v.numel());
  };
  CHECK(run() == run());
}

TEST_CASE("optimizer_step: sgd arithmetic, zero gradients, adaptive descent") {
  nd::ParamSet ps;
  ps.add("theta", nd::Tensor({1}, {1.0}));
  nd::GradMap grads;
  grads.emplace("theta", nd::Tensor({1}, {2.0}));
  nd::OptimConfig sgd{nd::OptimRule::sgd};
  nd::optimizer_step(ps, grads, 0.1, sgd);
  CHECK(ps.at("theta")[0] == doctest::Approx(0.8));

  // zero gradient leaves parameters unchanged under both rules
  nd::GradMap zero;
  zero.emplace("theta", nd::Tensor({1}, {0.0}));
  nd::optimizer_step(ps, zero, 0.1, sgd);
  CHECK(ps.at("theta")[0] == doctest::Approx(0.8));
  nd::optimizer_step(ps, zero, 0.1, {});
  CHECK(ps.at("theta")[0] == doctest::Approx(0.8));

  // two adaptive steps on a fixed quadratic decrease the loss
  nd::ParamSet q;
  q.add("x", nd::Tensor({1}, {3.0}));
  auto loss = [&]() { return (q.at("x")[0] - 1.0) * (q.at("x")[0] - 1.0); };
  const double l0 = loss();
  for (int i = 0; i < 2; ++i) {
    nd::GradMap gm;
    gm.emplace("x", nd::Tensor({1}, {2.0 * (q.at("x")[0] - 1.0)}));
    nd::optimizer_step(q, gm, 0.05, {});
  }
  CHECK(loss() < l0);
}

TEST_CASE("non-finite gradient aborts with a diagnostic") {
  nd::ParamSet ps;
  ps.add("w", nd::Tensor({2}, {0.0, 0.0}));
  nd::GradMap grads;
  grads.emplace("w", nd::Tensor({2}, {1.0, std::numeric_limits<double>::quiet_NaN()}));
  CHECK_THROWS_AS(nd::optimizer_step(ps, grads, 0.1), NumericalError);
}

TEST_CASE("soft_update endpoints, arithmetic, and geometric convergence") {
  auto make = [](double v) {
    nd::ParamSet ps;
    ps.add("w", nd::Tensor({2}, {v, v}));
    return ps;
  };
  nd::ParamSet online = make(1.0);

  nd::ParamSet t1 = make(0.0);
  nd::soft_update(t1, online, 1.0);
  CHECK(t1.at("w")[0] == 1.0);

  nd::ParamSet t0 = make(0.0);
  nd::soft_update(t0, online, 0.0);
  CHECK(t0.at("w")[0] == 0.0);

  nd::ParamSet t = make(0.0);
  nd::soft_update(t, online, 0.01);
  CHECK(t.at("w")[0] == doctest::Approx(0.01));

  CHECK_THROWS_AS(nd::soft_update(t, online, 1.5), ConfigError);
  CHECK_THROWS_AS(nd::soft_update(t, online, -0.1), ConfigError);

  // repeated updates shrink the gap by exactly (1 - tau) per step
  double gap = std::fabs(t.at("w")[0] - 1.0);
  for (int i = 0; i < 50; ++i) {
    nd::soft_update(t, online, 0.01);
    const double next_gap = std::fabs(t.at("w")[0] - 1.0);
    CHECK(next_gap == doctest::Approx(gap * 0.99).epsilon(1e-9));
    gap = next_gap;
  }
}

TEST_CASE("checkpoint round-trips parameters byte-exactly") {
  std::mt19937_64 rng(11);
  nd::ParamSet ps;
  ps.add("agent.w1", random_tensor({3, 5}, rng));
  ps.add("agent.b1", random_tensor({5}, rng));
  ps.add("mixer.vw", random_tensor({4, 1}, rng));
  const std::string path = (std::filesystem::temp_directory_path() / "coex_ckpt_test.coex")
                               .string();
  nd::save_checkpoint(path, ps);
  const nd::ParamSet loaded = nd::load_checkpoint(path);
  CHECK(loaded.size() == ps.size());
  for (const auto& [name, entry] : ps) {
    const nd::Tensor& l = loaded.at(name);
    REQUIRE(l.same_shape(entry.value));
    for (std::size_t i = 0; i < l.numel(); ++i) CHECK(l[i] == entry.value[i]);
  }
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint rejects foreign files") {
  const std::string path = (std::filesystem::temp_directory_path() / "coex_bad.coex").string();
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOPE0000";
  }
  CHECK_THROWS_AS(nd::load_checkpoint(path), ConfigError);
  std::filesystem::remove(path);
}

}  // TEST_SUITE

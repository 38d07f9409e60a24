#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "nfetc/adam.hpp"
#include "nfetc/error.hpp"
#include "nfetc/param_set.hpp"
#include "nfetc/random.hpp"

using namespace nfetc;

TEST_CASE("engine output matches the standard's reference value") {
  // The 10000th output of a default-seeded mt19937_64 is fixed by the standard.
  Rng rng(5489u);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next();
  CHECK(x == 9981545732273789042ull);
}

TEST_CASE("uniform, below and normal draws") {
  Rng rng(3);
  double mean = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    mean += u;
  }
  CHECK(mean / n == doctest::Approx(0.5).epsilon(0.01));

  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);

  mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    mean += z;
    sq += z * z;
  }
  CHECK(std::abs(mean / n) < 0.01);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("same seed gives the same stream and shuffle is a permutation") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  std::vector<int> items{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Rng r(1);
  r.shuffle(items);
  CHECK(std::set<int>(items.begin(), items.end()).size() == 10);
}

TEST_CASE("dropout masks") {
  Rng rng(9);
  const Tensor ones = dropout_mask({50}, 1.0, rng);
  for (double v : ones.values()) CHECK(v == 1.0);
  const Tensor m = dropout_mask({100000}, 0.8, rng);
  double total = 0.0;
  for (double v : m.values()) {
    CHECK((v == 0.0 || v == doctest::Approx(1.25)));
    total += v;
  }
  // Inverted dropout keeps the expectation at 1.
  CHECK(total / 100000 == doctest::Approx(1.0).epsilon(0.01));
  CHECK_THROWS(dropout_mask({3}, 0.0, rng));
  CHECK_THROWS(dropout_mask({3}, 1.5, rng));
}

TEST_CASE("adam matches a hand-rolled reference over several steps") {
  ParamSet params;
  params.add("w", Tensor::vector({0.5, -1.0}));
  params.add("frozen", Tensor::vector({3.0}), false);
  AdamState state;
  const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;

  std::vector<double> w{0.5, -1.0}, m(2, 0.0), v(2, 0.0);
  const std::vector<std::vector<double>> grads{{1.0, -2.0}, {0.5, 0.0}, {-3.0, 1.0}};
  for (std::size_t t = 1; t <= grads.size(); ++t) {
    const auto& g = grads[t - 1];
    for (std::size_t i = 0; i < 2; ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(b1, t));
      const double vh = v[i] / (1 - std::pow(b2, t));
      w[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
    GradientMap gm{{"w", Tensor::vector(g)}, {"frozen", Tensor::vector({5.0})}};
    adam_step(params, gm, state, lr);
  }
  CHECK(params.get("w")[0] == doctest::Approx(w[0]).epsilon(1e-14));
  CHECK(params.get("w")[1] == doctest::Approx(w[1]).epsilon(1e-14));
  CHECK(params.get("frozen")[0] == 3.0);
  CHECK(state.step == 3);
}

TEST_CASE("adam rejects bad inputs") {
  ParamSet params;
  params.add("w", Tensor::vector({0.5, -1.0}));
  AdamState state;
  CHECK_THROWS(adam_step(params, {{"w", Tensor::vector({1.0, 1.0})}}, state, 0.0));
  CHECK_THROWS_AS(adam_step(params, {{"w", Tensor::vector({1.0})}}, state, 0.1), ShapeError);
}

TEST_CASE("parameter sets") {
  ParamSet p;
  p.add("a", Tensor::vector({1, 2}));
  p.add("b", Tensor::vector({3}), false);
  CHECK_THROWS(p.add("a", Tensor::vector({0})));
  CHECK_THROWS(p.get("missing"));
  CHECK(p.l2_squared() == 5.0);
  CHECK(p.entries()[0].name == "a");

  Tape tape;
  BoundParams bound(tape, p);
  CHECK(tape.requires_grad(bound["a"].id()));
  CHECK_FALSE(tape.requires_grad(bound["b"].id()));
  Var loss = bound.l2_squared(tape);
  CHECK(loss.scalar() == 5.0);
  const GradientMap g = gradients(loss, p, bound);
  CHECK(g.at("a") == Tensor::vector({2, 4}));
  CHECK(g.count("b") == 0);
}

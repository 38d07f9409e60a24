#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "nfetc/autodiff.hpp"
#include "nfetc/random.hpp"

namespace nfetc::testing {

using ScalarFn = std::function<Var(std::span<const Var>)>;

// Element-wise |a - n| / max(|a|, |n|, 1e-6), maximised over every input.
inline double max_relative_error(std::vector<Tensor> inputs, const ScalarFn& f, double h = 1e-5) {
  auto run = [&](std::vector<Tensor>* grads) {
    Tape tape;
    std::vector<Var> vars;
    for (const Tensor& t : inputs) vars.push_back(tape.variable(t));
    Var y = f(vars);
    if (grads) {
      tape.backward(y);
      for (const Var& v : vars) grads->push_back(v.grad());
    }
    return y.scalar();
  };
  std::vector<Tensor> analytic;
  run(&analytic);
  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const double keep = inputs[k][i];
      inputs[k][i] = keep + h;
      const double up = run(nullptr);
      inputs[k][i] = keep - h;
      const double down = run(nullptr);
      inputs[k][i] = keep;
      const double numeric = (up - down) / (2 * h);
      const double a = analytic[k][i];
      worst = std::max(worst, std::abs(a - numeric) /
                                  std::max({std::abs(a), std::abs(numeric), 1e-6}));
    }
  }
  return worst;
}

// Reduces any output to a scalar with fixed pseudo-random weights so every
// output element contributes a distinct gradient.
inline Var project(Var out, std::uint64_t seed = 99) {
  Rng rng(seed);
  Tensor w(out.shape());
  for (double& v : w.values()) v = rng.uniform(-1.0, 1.0);
  return sum(mul(out, out.tape().constant(std::move(w))));
}

inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace nfetc::testing

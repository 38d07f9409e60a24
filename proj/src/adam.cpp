#include "nfetc/adam.hpp"

#include <cmath>

#include "nfetc/error.hpp"

namespace nfetc {

void adam_step(ParamSet& params, const GradientMap& grads, AdamState& state, double lr) {
  if (!(lr > 0.0)) throw Error("Adam learning rate must be positive");
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);

  for (auto& e : params.entries()) {
    if (!e.trainable) continue;
    auto g = grads.find(e.name);
    if (g == grads.end()) continue;
    if (g->second.shape() != e.value.shape()) {
      throw ShapeError("gradient for '" + e.name + "' has shape " + shape_string(g->second.shape()) +
                       ", parameter has " + shape_string(e.value.shape()));
    }
    auto [m_it, m_new] = state.first_moment.try_emplace(e.name, e.value.shape(), 0.0);
    auto [v_it, v_new] = state.second_moment.try_emplace(e.name, e.value.shape(), 0.0);
    Tensor& m = m_it->second;
    Tensor& v = v_it->second;
    const Tensor& grad = g->second;
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * grad[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      e.value[i] -= lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

}  // namespace nfetc

#include "nfetc/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "nfetc/error.hpp"

namespace nfetc {

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw Error("Rng::below(0)");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t u;
  do {
    u = engine_();
  } while (u >= limit);
  return static_cast<std::size_t>(u % bound);
}

double Rng::normal() {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Tensor dropout_mask(const Shape& shape, double keep_prob, Rng& rng) {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw Error("dropout keep probability must lie in (0, 1], got " + std::to_string(keep_prob));
  }
  Tensor mask(shape, 1.0);
  if (keep_prob == 1.0) return mask;
  const double kept = 1.0 / keep_prob;
  for (double& v : mask.values()) v = rng.bernoulli(keep_prob) ? kept : 0.0;
  return mask;
}

}  // namespace nfetc

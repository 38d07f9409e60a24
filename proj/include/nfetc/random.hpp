#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "nfetc/tensor.hpp"

namespace nfetc {

/// Seedable generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are not (their algorithms are
/// implementation-defined), so every draw below is derived from raw engine
/// output with a documented transform:
///   uniform01     = (u >> 11) * 2^-53
///   below(n)      = rejection sampling on u to avoid modulo bias
///   normal        = Box-Muller on two uniform01 draws
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::size_t below(std::size_t n);
  double normal();
  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Inverted-dropout mask: each entry is 1/keep_prob with probability
/// keep_prob and 0 otherwise. keep_prob == 1 yields all ones without
/// consuming randomness.
Tensor dropout_mask(const Shape& shape, double keep_prob, Rng& rng);

}  // namespace nfetc

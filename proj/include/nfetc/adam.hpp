#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "nfetc/param_set.hpp"

namespace nfetc {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates per trainable parameter plus the step count.
struct AdamState {
  AdamConfig config;
  std::map<std::string, Tensor> first_moment;
  std::map<std::string, Tensor> second_moment;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update. Frozen parameters are left untouched even if
/// a gradient is supplied for them.
void adam_step(ParamSet& params, const GradientMap& grads, AdamState& state, double lr);

}  // namespace nfetc

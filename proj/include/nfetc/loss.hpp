#pragma once

#include <span>
#include <string>
#include <vector>

#include "nfetc/autodiff.hpp"
#include "nfetc/corpus.hpp"
#include "nfetc/model.hpp"
#include "nfetc/param_set.hpp"
#include "nfetc/type_forest.hpp"

namespace nfetc {

enum class LossMode {
  standard,  // -log p(y) with y the only terminal label
  variant,   // -log p(y*) with y* the most probable terminal label
};

struct LossConfig {
  double lambda = 0.0;   // L2 weight
  double beta = 0.0;     // ancestor-mass weight for hierarchical normalization
  LossMode mode = LossMode::standard;
  bool hierarchical = false;
  // The variant selects y* on the adjusted distribution; false uses raw p-hat.
  bool select_on_adjusted = true;

  void validate() const;
};

// Floor applied inside every log.
inline constexpr double kProbabilityFloor = 1e-12;

/// q(y) = p(y) + beta * sum of p over y's ancestors, renormalised to sum 1.
std::vector<double> hierarchical_adjust(std::span<const double> probabilities,
                                        const TypeForest& forest, double beta);

/// Highest-probability candidate, ties to the lowest type id.
TypeId select_target(std::span<const double> probabilities, std::span<const TypeId> candidates);

double cross_entropy(std::span<const double> adjusted, TypeId gold, double l2_squared,
                     double lambda);
double cross_entropy(std::span<const double> adjusted, TypeId gold, const ParamSet& params,
                     double lambda);
double variant_cross_entropy(std::span<const double> adjusted, std::span<const TypeId> terminals,
                             double l2_squared, double lambda);
double variant_cross_entropy(std::span<const double> adjusted, std::span<const TypeId> terminals,
                             const ParamSet& params, double lambda);

/// [K, K] matrix M with M(y, y) = 1 and M(y, a) = beta for every ancestor a of
/// y, so that q = M p.
Tensor hierarchy_matrix(const TypeForest& forest, double beta);

Var hierarchical_adjust(Var probabilities, const Tensor& hierarchy);

/// Negative log-likelihood of one mention without the L2 term.
Var mention_loss(Var probabilities, const MentionTriple& mention, const TypeForest& forest,
                 const LossConfig& config, const Tensor* hierarchy);

/// Mean per-mention loss plus a single lambda * ||theta||^2 over trainable parameters.
Var batch_loss(std::span<const ForwardTrace> traces, std::span<const MentionTriple> mentions,
               const LossConfig& config, const TypeForest& forest, const BoundParams& params);

}  // namespace nfetc

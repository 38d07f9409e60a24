#include "nfetc/loss.hpp"

#include <algorithm>
#include <cmath>

#include "nfetc/error.hpp"

namespace nfetc {

void LossConfig::validate() const {
  if (!(lambda >= 0.0)) throw Error("lambda must be non-negative");
  if (!(beta >= 0.0)) throw Error("beta must be non-negative");
}

std::vector<double> hierarchical_adjust(std::span<const double> probabilities,
                                        const TypeForest& forest, double beta) {
  if (!(beta >= 0.0)) throw Error("beta must be non-negative");
  if (probabilities.size() != forest.size()) {
    throw ShapeError("distribution has " + std::to_string(probabilities.size()) +
                     " entries for a forest of " + std::to_string(forest.size()) + " types");
  }
  std::vector<double> q(probabilities.begin(), probabilities.end());
  if (beta == 0.0) return q;
  double total = 0.0;
  for (TypeId y = 0; y < q.size(); ++y) {
    double ancestor_mass = 0.0;
    for (TypeId a : forest.ancestors(y)) ancestor_mass += probabilities[a];
    q[y] += beta * ancestor_mass;
    total += q[y];
  }
  for (double& v : q) v /= total;
  return q;
}

TypeId select_target(std::span<const double> probabilities, std::span<const TypeId> candidates) {
  if (candidates.empty()) throw Error("no candidate types to select from");
  TypeId best = candidates[0];
  for (TypeId c : candidates) {
    if (c >= probabilities.size()) throw Error("candidate type id out of range");
    if (probabilities[c] > probabilities[best] ||
        (probabilities[c] == probabilities[best] && c < best)) {
      best = c;
    }
  }
  return best;
}

double cross_entropy(std::span<const double> adjusted, TypeId gold, double l2_squared,
                     double lambda) {
  if (gold >= adjusted.size()) throw Error("gold type id out of range");
  return -std::log(std::max(adjusted[gold], kProbabilityFloor)) + lambda * l2_squared;
}

double cross_entropy(std::span<const double> adjusted, TypeId gold, const ParamSet& params,
                     double lambda) {
  return cross_entropy(adjusted, gold, params.l2_squared(), lambda);
}

double variant_cross_entropy(std::span<const double> adjusted, std::span<const TypeId> terminals,
                             double l2_squared, double lambda) {
  return cross_entropy(adjusted, select_target(adjusted, terminals), l2_squared, lambda);
}

double variant_cross_entropy(std::span<const double> adjusted, std::span<const TypeId> terminals,
                             const ParamSet& params, double lambda) {
  return variant_cross_entropy(adjusted, terminals, params.l2_squared(), lambda);
}

Tensor hierarchy_matrix(const TypeForest& forest, double beta) {
  if (!(beta >= 0.0)) throw Error("beta must be non-negative");
  const std::size_t k = forest.size();
  Tensor m({k, k}, 0.0);
  for (TypeId y = 0; y < k; ++y) {
    m.at(y, y) = 1.0;
    for (TypeId a : forest.ancestors(y)) m.at(y, a) = beta;
  }
  return m;
}

Var hierarchical_adjust(Var probabilities, const Tensor& hierarchy) {
  Var q = matmul(probabilities.tape().constant(hierarchy), probabilities);
  return div(q, sum(q));
}

Var mention_loss(Var probabilities, const MentionTriple& mention, const TypeForest& forest,
                 const LossConfig& config, const Tensor* hierarchy) {
  if (config.hierarchical && !hierarchy) throw Error("hierarchical loss needs a hierarchy matrix");
  const Var adjusted =
      config.hierarchical ? hierarchical_adjust(probabilities, *hierarchy) : probabilities;
  const TypeSet terminals = terminal_labels(forest, mention);

  TypeId target;
  if (config.mode == LossMode::standard) {
    if (terminals.size() != 1) {
      throw Error("standard cross-entropy needs a single type-path label; got " +
                  std::to_string(terminals.size()) + " terminal types");
    }
    target = terminals.front();
  } else {
    const Var& basis = config.select_on_adjusted ? adjusted : probabilities;
    target = select_target(basis.value().values(), terminals);
  }
  return scale(log(pick(adjusted, target), kProbabilityFloor), -1.0);
}

Var batch_loss(std::span<const ForwardTrace> traces, std::span<const MentionTriple> mentions,
               const LossConfig& config, const TypeForest& forest, const BoundParams& params) {
  if (traces.empty()) throw Error("empty batch");
  if (traces.size() != mentions.size()) throw Error("batch traces and mentions differ in length");
  config.validate();
  const Tensor hierarchy = config.hierarchical ? hierarchy_matrix(forest, config.beta) : Tensor();
  std::vector<Var> terms;
  terms.reserve(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    terms.push_back(mention_loss(traces[i].probabilities, mentions[i], forest, config,
                                 config.hierarchical ? &hierarchy : nullptr));
  }
  Var mean = scale(add_n(terms), 1.0 / static_cast<double>(terms.size()));
  if (config.lambda == 0.0) return mean;
  Tape& tape = mean.tape();
  Var parts[] = {mean, scale(params.l2_squared(tape), config.lambda)};
  return add_n(parts);
}

}  // namespace nfetc

#pragma once

#include <algorithm>
#include <iterator>
#include <set>
#include <vector>

#include "nfetc/metrics.hpp"
#include "nfetc/random.hpp"

namespace nfetc::testing {

// Brute-force scoring straight from set intersections and sizes.
struct OracleScores {
  double strict, macro_p, macro_r, macro_f1, micro_p, micro_r, micro_f1;
};

inline double oracle_f1(double p, double r) { return p + r == 0.0 ? 0.0 : 2 * p * r / (p + r); }

inline OracleScores oracle_scores(const std::vector<EvalPair>& pairs) {
  double exact = 0, p_sum = 0, r_sum = 0, overlap = 0, predicted = 0, gold = 0;
  for (const EvalPair& e : pairs) {
    const std::set<TypeId> g(e.gold.begin(), e.gold.end()), p(e.predicted.begin(), e.predicted.end());
    std::vector<TypeId> both;
    std::set_intersection(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(both));
    exact += g == p ? 1 : 0;
    p_sum += static_cast<double>(both.size()) / static_cast<double>(p.size());
    r_sum += static_cast<double>(both.size()) / static_cast<double>(g.size());
    overlap += static_cast<double>(both.size());
    predicted += static_cast<double>(p.size());
    gold += static_cast<double>(g.size());
  }
  const double n = static_cast<double>(pairs.size());
  OracleScores s{};
  s.strict = exact / n;
  s.macro_p = p_sum / n;
  s.macro_r = r_sum / n;
  s.macro_f1 = oracle_f1(s.macro_p, s.macro_r);
  s.micro_p = overlap / predicted;
  s.micro_r = overlap / gold;
  s.micro_f1 = oracle_f1(s.micro_p, s.micro_r);
  return s;
}

inline std::vector<EvalPair> random_pairs(Rng& rng, std::size_t universe, std::size_t max_pairs) {
  auto random_set = [&] {
    std::vector<TypeId> ids;
    const std::size_t n = 1 + rng.below(4);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(rng.below(universe));
    return make_type_set(std::move(ids));
  };
  std::vector<EvalPair> pairs(1 + rng.below(max_pairs));
  for (EvalPair& e : pairs) {
    e.gold = random_set();
    e.predicted = rng.bernoulli(0.3) ? e.gold : random_set();
  }
  return pairs;
}

inline bool agrees(const Metrics& m, const OracleScores& o) {
  return m.strict == o.strict && m.macro.precision == o.macro_p && m.macro.recall == o.macro_r &&
         m.macro.f1 == o.macro_f1 && m.micro.precision == o.micro_p && m.micro.recall == o.micro_r &&
         m.micro.f1 == o.micro_f1;
}

}  // namespace nfetc::testing

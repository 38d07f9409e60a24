#include "nfetc/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>

#include "json.hpp"
#include "nfetc/error.hpp"
#include "nfetc/loss.hpp"
#include "nfetc/model.hpp"

namespace nfetc {

namespace {

std::size_t overlap(const TypeSet& a, const TypeSet& b) {
  std::vector<TypeId> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return common.size();
}

void require_nonempty(std::span<const EvalPair> pairs) {
  if (pairs.empty()) throw Error("metrics need at least one evaluation pair");
  for (const auto& p : pairs) {
    if (p.gold.empty() || p.predicted.empty()) throw Error("evaluation sets must be nonempty");
  }
}

}  // namespace

double harmonic_mean(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

double strict_accuracy(std::span<const EvalPair> pairs) {
  require_nonempty(pairs);
  std::size_t exact = 0;
  for (const auto& p : pairs) exact += p.gold == p.predicted ? 1 : 0;
  return static_cast<double>(exact) / static_cast<double>(pairs.size());
}

PrecisionRecall loose_macro(std::span<const EvalPair> pairs) {
  require_nonempty(pairs);
  double p_sum = 0.0, r_sum = 0.0;
  for (const auto& p : pairs) {
    const auto hit = static_cast<double>(overlap(p.gold, p.predicted));
    p_sum += hit / static_cast<double>(p.predicted.size());
    r_sum += hit / static_cast<double>(p.gold.size());
  }
  const auto n = static_cast<double>(pairs.size());
  PrecisionRecall out{p_sum / n, r_sum / n, 0.0};
  out.f1 = harmonic_mean(out.precision, out.recall);
  return out;
}

PrecisionRecall loose_micro(std::span<const EvalPair> pairs) {
  require_nonempty(pairs);
  std::size_t hits = 0, predicted = 0, gold = 0;
  for (const auto& p : pairs) {
    hits += overlap(p.gold, p.predicted);
    predicted += p.predicted.size();
    gold += p.gold.size();
  }
  PrecisionRecall out{static_cast<double>(hits) / static_cast<double>(predicted),
                      static_cast<double>(hits) / static_cast<double>(gold), 0.0};
  out.f1 = harmonic_mean(out.precision, out.recall);
  return out;
}

Metrics compute_metrics(std::span<const EvalPair> pairs) {
  return Metrics{strict_accuracy(pairs), loose_macro(pairs), loose_micro(pairs)};
}

std::string metrics_report(const Metrics& m) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer,
                "strict=%.4f macro_p=%.4f macro_r=%.4f macro_f1=%.4f micro_p=%.4f micro_r=%.4f "
                "micro_f1=%.4f\n",
                m.strict, m.macro.precision, m.macro.recall, m.macro.f1, m.micro.precision,
                m.micro.recall, m.micro.f1);
  return buffer;
}

std::string metrics_json(const Metrics& m) {
  const nlohmann::ordered_json j{{"strict", m.strict},         {"macro_p", m.macro.precision},
                                 {"macro_r", m.macro.recall},   {"macro_f1", m.macro.f1},
                                 {"micro_p", m.micro.precision}, {"micro_r", m.micro.recall},
                                 {"micro_f1", m.micro.f1}};
  return j.dump() + "\n";
}

std::vector<EvalPair> make_pairs(const TypeForest& forest, std::span<const MentionTriple> mentions,
                                 std::span<const TypeId> predictions) {
  if (mentions.size() != predictions.size()) throw Error("one prediction per mention required");
  std::vector<EvalPair> pairs;
  pairs.reserve(mentions.size());
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    pairs.push_back({make_type_set(mentions[i].labels), expand_to_path(forest, predictions[i])});
  }
  return pairs;
}

std::vector<TypeId> predict_types(const NfetcModel& model, const WordEmbeddings& embeddings,
                                  std::span<const MentionTriple> mentions, const TypeForest& forest,
                                  double inference_beta) {
  if (inference_beta <= 0.0) return model.predict(embeddings, mentions);
  std::vector<TypeId> out;
  for (const auto& p : model.predict_proba(embeddings, mentions)) {
    out.push_back(argmax(hierarchical_adjust(p, forest, inference_beta)));
  }
  return out;
}

Metrics evaluate(const NfetcModel& model, const WordEmbeddings& embeddings, const Corpus& corpus,
                 const TypeForest& forest, double inference_beta) {
  const Corpus windowed = window(corpus, model.config.window);
  const auto predictions =
      predict_types(model, embeddings, windowed.mentions, forest, inference_beta);
  return compute_metrics(make_pairs(forest, windowed.mentions, predictions));
}

}  // namespace nfetc

#pragma once

#include <span>
#include <string>
#include <vector>

#include "nfetc/corpus.hpp"
#include "nfetc/embeddings.hpp"
#include "nfetc/type_forest.hpp"

namespace nfetc {

struct NfetcModel;

struct EvalPair {
  TypeSet gold;
  TypeSet predicted;
};

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

double harmonic_mean(double precision, double recall);

double strict_accuracy(std::span<const EvalPair> pairs);
// Per-mention precision and recall averaged over mentions; F1 from the averages.
PrecisionRecall loose_macro(std::span<const EvalPair> pairs);
// Intersection and set sizes pooled over all mentions.
PrecisionRecall loose_micro(std::span<const EvalPair> pairs);

struct Metrics {
  double strict = 0.0;
  PrecisionRecall macro;
  PrecisionRecall micro;
};

Metrics compute_metrics(std::span<const EvalPair> pairs);

// `strict=... macro_p=... macro_r=... macro_f1=... micro_p=... micro_r=... micro_f1=...`
std::string metrics_report(const Metrics& m);
std::string metrics_json(const Metrics& m);

/// Gold set is the mention's label set; the prediction is the full type-path of
/// the argmax type.
std::vector<EvalPair> make_pairs(const TypeForest& forest, std::span<const MentionTriple> mentions,
                                 std::span<const TypeId> predictions);

/// Argmax types in inference mode. A positive `inference_beta` takes the argmax
/// of the hierarchically adjusted distribution instead of raw p-hat.
std::vector<TypeId> predict_types(const NfetcModel& model, const WordEmbeddings& embeddings,
                                  std::span<const MentionTriple> mentions, const TypeForest& forest,
                                  double inference_beta = 0.0);

/// Windows the corpus to the model's context size, predicts every mention in
/// inference mode, and scores the expanded predictions.
Metrics evaluate(const NfetcModel& model, const WordEmbeddings& embeddings, const Corpus& corpus,
                 const TypeForest& forest, double inference_beta = 0.0);

}  // namespace nfetc

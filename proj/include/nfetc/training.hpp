#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nfetc/config.hpp"
#include "nfetc/corpus.hpp"
#include "nfetc/embeddings.hpp"
#include "nfetc/loss.hpp"
#include "nfetc/metrics.hpp"
#include "nfetc/model.hpp"

namespace nfetc {

/// Which training set and loss a named model variant uses.
struct Variant {
  std::string name;
  bool filtered = true;  // D_filtered when true, D_raw otherwise
  LossConfig loss;
};

/// "NFETC(f)", "NFETC-hier(f)", "NFETC(r)" or "NFETC-hier(r)". Lambda and beta
/// are taken from `hp`.
Variant select_variant(std::string_view name, const HyperParams& hp);
const std::vector<std::string>& variant_names();

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  Metrics dev;
};

std::string epoch_log_header();
std::string format_epoch_log(const EpochLog& log);

struct TrainOptions {
  HyperParams hp;
  LossConfig loss;
  bool mention_positions = false;
  bool mention_dropout = true;
  bool adjust_at_inference = false;
  std::function<void(const EpochLog&)> on_epoch;
};

struct RunResult {
  std::vector<EpochLog> epochs;
  std::size_t best_epoch = 0;  // 1-based; 0 only if no epoch ran
  Metrics best_dev;
  NfetcModel model;  // parameters from the best epoch
};

/// Mini-batch Adam on the batch loss with epoch-level shuffling. After every
/// epoch the dev set is scored; the parameters with the highest dev strict
/// accuracy are kept and training stops after `patience` epochs without
/// improvement. Corpora are windowed to hp.window here.
RunResult train(const Corpus& train_corpus, const Corpus& dev_corpus, const TypeForest& forest,
                const WordEmbeddings& embeddings, const TrainOptions& options);

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single run
};

struct MultiRunResult {
  std::vector<std::uint64_t> seeds;
  std::vector<Metrics> test;  // one per seed
  MetricSummary strict, macro_f1, micro_f1;
};

MetricSummary summarize(std::span<const double> values);

using RunCallback = std::function<void(std::uint64_t seed, const RunResult&, const Metrics& test)>;

/// Independent runs, one per seed, each scored on `test_corpus`.
MultiRunResult run_multi(std::span<const std::uint64_t> seeds, const Corpus& train_corpus,
                         const Corpus& dev_corpus, const Corpus& test_corpus,
                         const TypeForest& forest, const WordEmbeddings& embeddings,
                         const TrainOptions& options, const RunCallback& on_run = {});

std::string format_multi_run(const MultiRunResult& result);

}  // namespace nfetc

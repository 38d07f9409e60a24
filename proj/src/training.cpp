#include "nfetc/training.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "nfetc/adam.hpp"
#include "nfetc/error.hpp"

namespace nfetc {

const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names = {"NFETC(f)", "NFETC-hier(f)", "NFETC(r)",
                                                 "NFETC-hier(r)"};
  return names;
}

Variant select_variant(std::string_view name, const HyperParams& hp) {
  Variant v;
  v.name = std::string(name);
  v.loss.lambda = hp.lambda;
  v.loss.beta = hp.beta;
  if (name == "NFETC(f)" || name == "NFETC-hier(f)") {
    v.filtered = true;
    v.loss.mode = LossMode::standard;
  } else if (name == "NFETC(r)" || name == "NFETC-hier(r)") {
    v.filtered = false;
    v.loss.mode = LossMode::variant;
  } else {
    std::string valid;
    for (const auto& n : variant_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw Error("unknown variant '" + std::string(name) + "'; valid variants: " + valid);
  }
  v.loss.hierarchical = name.starts_with("NFETC-hier");
  return v;
}

std::string epoch_log_header() { return "epoch,train_loss,dev_strict,dev_macro,dev_micro"; }

std::string format_epoch_log(const EpochLog& log) {
  char buffer[160];
  std::snprintf(buffer, sizeof buffer, "%zu,%.6f,%.4f,%.4f,%.4f", log.epoch, log.train_loss,
                log.dev.strict, log.dev.macro.f1, log.dev.micro.f1);
  return buffer;
}

RunResult train(const Corpus& train_corpus, const Corpus& dev_corpus, const TypeForest& forest,
                const WordEmbeddings& embeddings, const TrainOptions& options) {
  const HyperParams& hp = options.hp;
  hp.validate();
  options.loss.validate();
  if (train_corpus.empty()) throw Error("training corpus is empty");
  if (dev_corpus.empty()) throw Error("development corpus is empty");

  const Corpus train_set = window(train_corpus, hp.window);
  const Corpus dev_set = window(dev_corpus, hp.window);

  ModelConfig config;
  config.word_dim = embeddings.dim();
  config.position_dim = hp.position_dim;
  config.hidden_dim = hp.hidden_dim;
  config.num_types = forest.size();
  config.window = hp.window;
  config.mention_positions = options.mention_positions;
  config.mention_dropout = options.mention_dropout;

  RunResult result;
  result.model = NfetcModel::create(config, hp.seed);
  NfetcModel& model = result.model;
  ParamSet best_params = model.params;
  AdamState adam;
  // Shuffling and dropout draw from a stream separate from initialisation.
  Rng rng(hp.seed ^ 0x9e3779b97f4a7c15ULL);
  const double inference_beta = options.adjust_at_inference ? options.loss.beta : 0.0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t since_best = 0;
  bool have_best = false;

  for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hp.batch) {
      const std::size_t stop = std::min(order.size(), start + hp.batch);
      std::vector<MentionTriple> batch;
      batch.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) batch.push_back(train_set.mentions[order[i]]);

      Tape tape;
      BoundParams bound(tape, model.params);
      std::vector<ForwardTrace> traces;
      traces.reserve(batch.size());
      for (const auto& m : batch) {
        traces.push_back(forward(bound, model.config, embeddings, m, Mode::train, &rng,
                                 hp.input_keep, hp.output_keep));
      }
      Var loss;
      try {
        loss = batch_loss(traces, batch, options.loss, forest, bound);
      } catch (const NumericError& e) {
        throw NumericError("training diverged in epoch " + std::to_string(epoch) + ": " + e.what());
      }
      if (!std::isfinite(loss.scalar())) {
        throw NumericError("training diverged in epoch " + std::to_string(epoch));
      }
      loss_total += loss.scalar() * static_cast<double>(batch.size());
      adam_step(model.params, gradients(loss, model.params, bound), adam, hp.lr);
    }

    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_total / static_cast<double>(order.size());
    log.dev = evaluate(model, embeddings, dev_set, forest, inference_beta);
    result.epochs.push_back(log);
    if (options.on_epoch) options.on_epoch(log);

    if (!have_best || log.dev.strict > result.best_dev.strict) {
      have_best = true;
      result.best_epoch = epoch;
      result.best_dev = log.dev;
      best_params = model.params;
      since_best = 0;
    } else if (++since_best >= hp.patience) {
      break;
    }
  }
  model.params = std::move(best_params);
  return result;
}

MetricSummary summarize(std::span<const double> values) {
  if (values.empty()) throw Error("nothing to summarize");
  MetricSummary s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

MultiRunResult run_multi(std::span<const std::uint64_t> seeds, const Corpus& train_corpus,
                         const Corpus& dev_corpus, const Corpus& test_corpus,
                         const TypeForest& forest, const WordEmbeddings& embeddings,
                         const TrainOptions& options, const RunCallback& on_run) {
  if (seeds.empty()) throw Error("run_multi needs at least one seed");
  MultiRunResult out;
  std::vector<double> strict, macro, micro;
  for (std::uint64_t seed : seeds) {
    TrainOptions run = options;
    run.hp.seed = seed;
    const RunResult r = train(train_corpus, dev_corpus, forest, embeddings, run);
    const double beta = options.adjust_at_inference ? options.loss.beta : 0.0;
    const Metrics m = evaluate(r.model, embeddings, test_corpus, forest, beta);
    if (on_run) on_run(seed, r, m);
    out.seeds.push_back(seed);
    out.test.push_back(m);
    strict.push_back(m.strict);
    macro.push_back(m.macro.f1);
    micro.push_back(m.micro.f1);
  }
  out.strict = summarize(strict);
  out.macro_f1 = summarize(macro);
  out.micro_f1 = summarize(micro);
  return out;
}

std::string format_multi_run(const MultiRunResult& r) {
  std::ostringstream out;
  char buffer[200];
  for (std::size_t i = 0; i < r.seeds.size(); ++i) {
    std::snprintf(buffer, sizeof buffer, "seed=%llu strict=%.4f macro_f1=%.4f micro_f1=%.4f\n",
                  static_cast<unsigned long long>(r.seeds[i]), r.test[i].strict, r.test[i].macro.f1,
                  r.test[i].micro.f1);
    out << buffer;
  }
  std::snprintf(buffer, sizeof buffer,
                "runs=%zu strict=%.1f+-%.1f macro_f1=%.1f+-%.1f micro_f1=%.1f+-%.1f\n",
                r.seeds.size(), 100 * r.strict.mean, 100 * r.strict.stddev, 100 * r.macro_f1.mean,
                100 * r.macro_f1.stddev, 100 * r.micro_f1.mean, 100 * r.micro_f1.stddev);
  out << buffer;
  return out.str();
}

}  // namespace nfetc

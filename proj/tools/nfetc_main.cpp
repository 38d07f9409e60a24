// nfetc: train, evaluate and apply the entity typing model from the command line.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nfetc/checkpoint.hpp"
#include "nfetc/config.hpp"
#include "nfetc/corpus.hpp"
#include "nfetc/embeddings.hpp"
#include "nfetc/error.hpp"
#include "nfetc/loss.hpp"
#include "nfetc/metrics.hpp"
#include "nfetc/training.hpp"
#include "nfetc/type_forest.hpp"

namespace fs = std::filesystem;
using namespace nfetc;

namespace {

constexpr int kExitError = 1;
constexpr int kExitMissingInput = 2;

struct MissingInput : Error {
  using Error::Error;
};

struct CommonOptions {
  std::string config;
  std::string profile;
  std::vector<std::string> overrides;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("-c,--config", o.config, "key=value config file");
  cmd.add_option("--profile", o.profile, "hyperparameter profile: figer or ontonotes");
  cmd.add_option("-s,--set", o.overrides, "override one config key (key=value), repeatable");
}

fs::path require_file(const fs::path& p, const std::string& what) {
  if (p.empty()) throw Error("no " + what + " path configured");
  const fs::path resolved = resolve_data_path(p);
  if (!fs::is_regular_file(resolved)) {
    throw MissingInput(what + " not found: " + resolved.string());
  }
  return resolved;
}

RunConfig load_config(const CommonOptions& o) {
  Settings settings;
  if (!o.config.empty()) settings = read_settings(require_file(o.config, "config file"));
  if (!o.profile.empty()) settings.emplace_back("profile", o.profile);
  for (const std::string& item : o.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error("--set expects key=value, got '" + item + "'");
    }
    settings.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return build_config(settings);
}

// Forest used for parsing corpora and the (possibly refined) one the model is
// trained over. Refinement keeps type ids, so corpora parsed against the first
// are valid for the second.
struct Forests {
  TypeForest labels;
  TypeForest model;
};

Forests load_forests(const RunConfig& rc) {
  Forests f;
  f.labels = TypeForest::load(require_file(rc.types, "type file"));
  f.model = f.labels;
  if (!rc.refine.empty()) {
    f.model = apply_refinement(f.labels, RefinementMap::load(require_file(rc.refine, "refinement map")));
  }
  return f;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << text;
  if (!out) throw Error("failed writing " + file.string());
}

Checkpoint load_model(const std::string& path) {
  return load_checkpoint(require_file(path, "checkpoint"));
}

void check_embeddings(const Checkpoint& ck, const WordEmbeddings& emb) {
  if (ck.model.config.word_dim != emb.dim()) {
    throw Error("checkpoint expects " + std::to_string(ck.model.config.word_dim) +
                "-d word vectors but the embedding file has " + std::to_string(emb.dim()));
  }
}

void print_block(const std::string& text) {
  std::cout << text;
  if (text.empty() || text.back() != '\n') std::cout << '\n';
}

double inference_beta(const RunConfig& rc) { return rc.adjust_at_inference ? rc.hp.beta : 0.0; }

int cmd_train(const CommonOptions& common) {
  const RunConfig rc = load_config(common);
  rc.hp.validate();
  const fs::path train_path = require_file(rc.train, "training corpus");
  const fs::path test_path = require_file(rc.test, "test corpus");
  const std::optional<fs::path> dev_path =
      rc.dev.empty() ? std::nullopt : std::optional(require_file(rc.dev, "dev corpus"));
  const Forests forests = load_forests(rc);
  const WordEmbeddings embeddings = WordEmbeddings::load(require_file(rc.embeddings, "embedding file"));

  const Corpus raw = parse_corpus(train_path, forests.labels, true);
  Corpus test = parse_corpus(test_path, forests.labels, true);
  Corpus dev;
  if (dev_path) {
    dev = parse_corpus(*dev_path, forests.labels, true);
  } else {
    std::tie(dev, test) = split_dev(test, rc.dev_fraction, rc.hp.seed);
  }

  const Variant variant = select_variant(rc.variant, rc.hp);
  const Corpus train_set = variant.filtered ? build_filtered(raw, forests.model) : raw;

  TrainOptions opt;
  opt.hp = rc.hp;
  opt.loss = variant.loss;
  opt.loss.select_on_adjusted = rc.select_on_adjusted;
  opt.mention_positions = rc.mention_positions;
  opt.mention_dropout = rc.mention_dropout;
  opt.adjust_at_inference = rc.adjust_at_inference;

  const fs::path out_dir = resolve_data_path(rc.out);
  fs::create_directories(out_dir);
  const bool multi = !rc.seeds.empty();
  const std::vector<std::uint64_t> seeds = multi ? rc.seeds : std::vector<std::uint64_t>{rc.hp.seed};

  std::cerr << variant.name << ": " << train_set.size() << " training mentions, " << dev.size()
            << " dev, " << test.size() << " test\n";

  auto suffix = [&](std::uint64_t seed) {
    return multi ? "_seed" + std::to_string(seed) : std::string();
  };
  std::string single_report;
  const auto on_run = [&](std::uint64_t seed, const RunResult& r, const Metrics& m) {
    std::string log = epoch_log_header() + "\n";
    for (const EpochLog& e : r.epochs) log += format_epoch_log(e) + "\n";
    write_text(out_dir / ("train_log" + suffix(seed) + ".csv"), log);
    save_checkpoint(out_dir / ("model" + suffix(seed) + ".ckpt"), r.model, forests.model);
    std::cerr << "seed " << seed << ": best epoch " << r.best_epoch << " of " << r.epochs.size()
              << "\n";
    single_report = metrics_report(m);
  };

  const MultiRunResult result =
      run_multi(seeds, train_set, dev, test, forests.model, embeddings, opt, on_run);
  const std::string report = multi ? format_multi_run(result) : single_report;
  write_text(out_dir / "metrics.txt", report);
  std::cout << report;
  return 0;
}

int cmd_eval(const CommonOptions& common, const std::string& checkpoint, const std::string& corpus,
             bool json) {
  const RunConfig rc = load_config(common);
  const Forests forests = load_forests(rc);
  const Checkpoint ck = load_model(checkpoint);
  check_forest(ck, forests.model);
  const fs::path corpus_path = require_file(corpus.empty() ? rc.test : fs::path(corpus), "corpus");
  const WordEmbeddings embeddings = WordEmbeddings::load(require_file(rc.embeddings, "embedding file"));
  check_embeddings(ck, embeddings);
  const Corpus c = parse_corpus(corpus_path, forests.labels, true);
  if (c.mentions.empty()) throw Error("corpus " + corpus_path.string() + " has no mentions");
  const Metrics m = evaluate(ck.model, embeddings, c, forests.model, inference_beta(rc));
  print_block(json ? metrics_json(m) : metrics_report(m));
  return 0;
}

std::string format_prediction(const TypeForest& forest, std::span<const double> dist, TypeId best) {
  std::vector<TypeId> order(dist.size());
  std::iota(order.begin(), order.end(), TypeId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](TypeId a, TypeId b) { return dist[a] > dist[b]; });
  std::string line = forest.name(best) + "\t";
  const TypeSet path = expand_to_path(forest, best);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) line += ',';
    line += forest.name(path[i]);
  }
  line += '\t';
  char buffer[32];
  for (std::size_t k = 0; k < std::min<std::size_t>(5, order.size()); ++k) {
    std::snprintf(buffer, sizeof buffer, "%.6f", dist[order[k]]);
    if (k) line += ' ';
    line += forest.name(order[k]) + "=" + buffer;
  }
  return line;
}

int cmd_predict(const CommonOptions& common, const std::string& checkpoint,
                const std::string& input, const std::string& output) {
  const RunConfig rc = load_config(common);
  const Forests forests = load_forests(rc);
  const Checkpoint ck = load_model(checkpoint);
  check_forest(ck, forests.model);
  const fs::path input_path = require_file(input, "input corpus");
  const WordEmbeddings embeddings = WordEmbeddings::load(require_file(rc.embeddings, "embedding file"));
  check_embeddings(ck, embeddings);

  const Corpus c = window(parse_corpus(input_path, forests.labels, false), ck.model.config.window);
  const auto dists = ck.model.predict_proba(embeddings, c.mentions);
  const double beta = inference_beta(rc);

  std::ostringstream out;
  for (const auto& raw : dists) {
    const std::vector<double> dist = beta > 0.0 ? hierarchical_adjust(raw, forests.model, beta) : raw;
    out << format_prediction(forests.model, dist, argmax(dist)) << "\n";
  }
  if (output.empty() || output == "-") {
    std::cout << out.str();
  } else {
    write_text(output, out.str());
  }
  return 0;
}

int cmd_stats(const CommonOptions& common, const std::string& corpus, bool json) {
  const RunConfig rc = load_config(common);
  const fs::path corpus_path = require_file(corpus.empty() ? rc.train : fs::path(corpus), "corpus");
  const Forests forests = load_forests(rc);
  const Corpus c = parse_corpus(corpus_path, forests.labels, true);
  if (c.mentions.empty()) throw Error("corpus " + corpus_path.string() + " has no mentions");
  const CorpusStats stats = compute_stats(c, forests.model);
  print_block(json ? stats_json(stats) : stats_key_value(stats));
  return 0;
}

int cmd_export_types(const std::string& checkpoint, const std::string& output) {
  const Checkpoint ck = load_model(checkpoint);
  const Tensor& w = ck.model.params.get(param::classifier_weight);
  std::string csv;
  for (std::size_t r = 0; r < w.rows(); ++r) {
    csv += std::to_string(r);
    for (std::size_t c = 0; c < w.cols(); ++c) csv += "," + format_double(w.at(r, c));
    csv += "\n";
  }
  if (output.empty() || output == "-") {
    std::cout << csv;
  } else {
    write_text(output, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fine-grained entity typing with a BiLSTM-attention classifier."};
  app.require_subcommand(1);
  app.footer(describe_config_keys());

  CommonOptions train_opts, eval_opts, predict_opts, stats_opts;
  std::string checkpoint, corpus, input, output;
  bool json = false;

  CLI::App* train = app.add_subcommand("train", "train a model variant and score it on the test set");
  add_common(*train, train_opts);

  CLI::App* eval = app.add_subcommand("eval", "score a checkpoint on a labelled corpus");
  add_common(*eval, eval_opts);
  eval->add_option("-m,--checkpoint", checkpoint, "model checkpoint")->required();
  eval->add_option("--corpus", corpus, "labelled corpus (default: configured test set)");
  eval->add_flag("--json", json, "print metrics as JSON");

  CLI::App* predict = app.add_subcommand("predict", "type every mention of an input file");
  add_common(*predict, predict_opts);
  predict->add_option("-m,--checkpoint", checkpoint, "model checkpoint")->required();
  predict->add_option("-i,--input", input, "mentions in corpus format, labels optional")->required();
  predict->add_option("-o,--output", output, "output file (default: stdout)");

  CLI::App* stats = app.add_subcommand("stats", "dataset statistics for a labelled corpus");
  add_common(*stats, stats_opts);
  stats->add_option("--corpus", corpus, "labelled corpus (default: configured train set)");
  stats->add_flag("--json", json, "print statistics as JSON");

  CLI::App* export_types = app.add_subcommand("export-types", "write classifier rows as CSV");
  export_types->add_option("-m,--checkpoint", checkpoint, "model checkpoint")->required();
  export_types->add_option("-o,--output", output, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(train_opts);
    if (*eval) return cmd_eval(eval_opts, checkpoint, corpus, json);
    if (*predict) return cmd_predict(predict_opts, checkpoint, input, output);
    if (*stats) return cmd_stats(stats_opts, corpus, json);
    if (*export_types) return cmd_export_types(checkpoint, output);
  } catch (const MissingInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

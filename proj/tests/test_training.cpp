#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "nfetc/checkpoint.hpp"
#include "nfetc/config.hpp"
#include "nfetc/error.hpp"
#include "nfetc/synthetic.hpp"
#include "nfetc/training.hpp"

using namespace nfetc;

namespace {

HyperParams small_hp() {
  HyperParams hp;
  hp.lr = 0.01;
  hp.position_dim = 3;
  hp.hidden_dim = 6;
  hp.input_keep = 0.9;
  hp.output_keep = 0.9;
  hp.batch = 16;
  hp.epochs = 3;
  hp.patience = 3;
  return hp;
}

SyntheticTask small_task() {
  SyntheticOptions o = overfit_options();
  o.train_size = 60;
  o.dev_size = 20;
  o.test_size = 20;
  o.word_dim = 6;
  return make_synthetic(o);
}

TrainOptions options_for(const std::string& variant, const HyperParams& hp) {
  TrainOptions opt;
  opt.hp = hp;
  opt.loss = select_variant(variant, hp).loss;
  return opt;
}

}  // namespace

TEST_CASE("variants map to a training set and a loss") {
  HyperParams hp;
  hp.lambda = 0.5;
  hp.beta = 0.3;
  const Variant f = select_variant("NFETC(f)", hp);
  CHECK(f.filtered);
  CHECK(f.loss.mode == LossMode::standard);
  CHECK_FALSE(f.loss.hierarchical);
  const Variant hr = select_variant("NFETC-hier(r)", hp);
  CHECK_FALSE(hr.filtered);
  CHECK(hr.loss.mode == LossMode::variant);
  CHECK(hr.loss.hierarchical);
  CHECK(hr.loss.beta == 0.3);
  CHECK(hr.loss.lambda == 0.5);
  CHECK(select_variant("NFETC-hier(f)", hp).loss.mode == LossMode::standard);
  CHECK(select_variant("NFETC(r)", hp).loss.mode == LossMode::variant);
  CHECK(variant_names().size() == 4);
  try {
    select_variant("NFETC(x)", hp);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("NFETC-hier(r)") != std::string::npos);
  }
}

TEST_CASE("profiles carry the per-dataset hyperparameters") {
  const HyperParams figer = profile_defaults("figer");
  CHECK(figer.lr == 0.0002);
  CHECK(figer.position_dim == 85);
  CHECK(figer.hidden_dim == 180);
  CHECK(figer.input_keep == 0.7);
  CHECK(figer.output_keep == 0.9);
  CHECK(figer.lambda == 0.0);
  CHECK(figer.beta == 0.4);
  const HyperParams onto = profile_defaults("ontonotes");
  CHECK(onto.lr == 0.0002);
  CHECK(onto.position_dim == 20);
  CHECK(onto.hidden_dim == 440);
  CHECK(onto.input_keep == 0.5);
  CHECK(onto.output_keep == 0.5);
  CHECK(onto.lambda == 0.0001);
  CHECK(onto.beta == 0.3);
  CHECK_THROWS(profile_defaults("wiki"));
}

TEST_CASE("config settings apply in order over the chosen profile") {
  const Settings s = parse_settings("# comment\nlr = 0.01\n\nprofile=ontonotes\nseeds=1, 2,3\n", "<cfg>");
  const RunConfig c = build_config(s);
  CHECK(c.profile == "ontonotes");
  CHECK(c.hp.lr == 0.01);
  CHECK(c.hp.hidden_dim == 440);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});

  CHECK_THROWS(build_config({{"learning_rate", "0.1"}}));
  CHECK_THROWS(build_config({{"lr", "fast"}}));
  CHECK_THROWS(build_config({{"mention_dropout", "maybe"}}));
  CHECK_THROWS(parse_settings("lr\n", "<cfg>"));

  const std::string help = describe_config_keys();
  for (const auto& [key, what] : config_keys()) CHECK(help.find(key) != std::string::npos);
  CHECK(help.find("figer=85 ontonotes=20") != std::string::npos);
}

TEST_CASE("data paths resolve against the data root") {
  ::setenv("NFETC_DATA_ROOT", "/data/root", 1);
  CHECK(resolve_data_path("figer/train.txt") == std::filesystem::path("/data/root/figer/train.txt"));
  CHECK(resolve_data_path("/abs/file") == std::filesystem::path("/abs/file"));
  ::unsetenv("NFETC_DATA_ROOT");
  CHECK(resolve_data_path("figer/train.txt") == std::filesystem::path("figer/train.txt"));
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  const SyntheticTask task = small_task();
  ModelConfig cfg;
  cfg.word_dim = 6;
  cfg.position_dim = 3;
  cfg.hidden_dim = 4;
  cfg.num_types = task.forest.size();
  const NfetcModel model = NfetcModel::create(cfg, 5);

  std::stringstream buffer;
  save_checkpoint(buffer, model, task.forest);
  const std::string text = buffer.str();
  const Checkpoint back = load_checkpoint(buffer, "<mem>");
  CHECK(back.model.config == model.config);
  CHECK(back.model.params == model.params);
  CHECK(back.type_names == task.forest.names());
  CHECK_NOTHROW(check_forest(back, task.forest));
  const std::vector<std::string> other{"/x", "/y"};
  CHECK_THROWS(check_forest(back, TypeForest::parse(other)));

  std::stringstream again;
  save_checkpoint(again, back.model, task.forest);
  CHECK(again.str() == text);

  for (double v : {0.1, -1e-300, 1.0 / 3.0, 123456789.123456789}) {
    CHECK(std::stod(format_double(v)) == v);
  }

  std::istringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS(load_checkpoint(truncated, "<cut>"));
  std::istringstream wrong("not-a-checkpoint 1\n");
  CHECK_THROWS(load_checkpoint(wrong, "<bad>"));
}

TEST_CASE("training is deterministic for a fixed seed") {
  const SyntheticTask task = small_task();
  const HyperParams hp = small_hp();
  const TrainOptions opt = options_for("NFETC-hier(r)", hp);
  const RunResult a = train(task.train, task.dev, task.forest, task.embeddings, opt);
  const RunResult b = train(task.train, task.dev, task.forest, task.embeddings, opt);
  CHECK(a.model.params == b.model.params);
  REQUIRE(a.epochs.size() == b.epochs.size());
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    CHECK(format_epoch_log(a.epochs[i]) == format_epoch_log(b.epochs[i]));
  }

  TrainOptions other = opt;
  other.hp.seed = 2;
  CHECK_FALSE(train(task.train, task.dev, task.forest, task.embeddings, other).model.params ==
              a.model.params);
}

TEST_CASE("training lowers the loss and keeps the best dev epoch") {
  const SyntheticTask task = small_task();
  HyperParams hp = small_hp();
  hp.epochs = 8;
  hp.patience = 8;
  std::vector<EpochLog> seen;
  TrainOptions opt = options_for("NFETC(f)", hp);
  opt.on_epoch = [&](const EpochLog& e) { seen.push_back(e); };
  const Corpus filtered = build_filtered(task.train, task.forest);
  const RunResult r = train(filtered, task.dev, task.forest, task.embeddings, opt);
  REQUIRE(seen.size() == 8);
  CHECK(seen.back().train_loss < seen.front().train_loss);
  double best = 0.0;
  for (const EpochLog& e : r.epochs) best = std::max(best, e.dev.strict);
  CHECK(r.best_dev.strict == best);
  CHECK(r.epochs[r.best_epoch - 1].dev.strict == best);
  // The returned parameters are the best epoch's.
  CHECK(evaluate(r.model, task.embeddings, task.dev, task.forest).strict == best);
}

TEST_CASE("early stopping halts after patience epochs without improvement") {
  const SyntheticTask task = small_task();
  HyperParams hp = small_hp();
  hp.lr = 1e-9;  // nothing changes, so no epoch after the first can improve
  hp.epochs = 20;
  hp.patience = 2;
  const RunResult r = train(task.train, task.dev, task.forest, task.embeddings, options_for("NFETC(r)", hp));
  CHECK(r.best_epoch == 1);
  CHECK(r.epochs.size() == 3);
}

TEST_CASE("training rejects standard loss on multi-path data") {
  const SyntheticTask task = make_synthetic(out_of_context_options());
  HyperParams hp = small_hp();
  hp.epochs = 1;
  hp.hidden_dim = 2;
  CHECK_THROWS(train(task.train, task.dev, task.forest, task.embeddings, options_for("NFETC(f)", hp)));
}

TEST_CASE("multi-seed summary") {
  const std::vector<double> v{1.0, 2.0, 3.0};
  const MetricSummary s = summarize(v);
  CHECK(s.mean == 2.0);
  CHECK(s.stddev == 1.0);
  CHECK(summarize(std::vector<double>{0.5}).stddev == 0.0);

  const SyntheticTask task = small_task();
  HyperParams hp = small_hp();
  hp.epochs = 1;
  const std::vector<std::uint64_t> seeds{1, 2};
  std::size_t calls = 0;
  const MultiRunResult r = run_multi(seeds, task.train, task.dev, task.test, task.forest,
                                     task.embeddings, options_for("NFETC-hier(r)", hp),
                                     [&](std::uint64_t, const RunResult&, const Metrics&) { ++calls; });
  CHECK(calls == 2);
  CHECK(r.test.size() == 2);
  const std::string text = format_multi_run(r);
  CHECK(text.find("seed=2 ") != std::string::npos);
  CHECK(text.find("runs=2 strict=") != std::string::npos);
  CHECK(text.find("+-") != std::string::npos);
}

TEST_CASE("synthetic tasks round-trip through files and carry the requested noise") {
  const SyntheticOptions o = out_of_context_options();
  const SyntheticTask task = make_synthetic(o);
  std::size_t multi = 0;
  for (const auto& m : task.train.mentions) multi += is_single_path(task.forest, m.labels) ? 0 : 1;
  CHECK(multi == static_cast<std::size_t>(o.out_of_context_rate * static_cast<double>(o.train_size) + 0.5));
  for (const auto& m : task.test.mentions) CHECK(is_single_path(task.forest, m.labels));

  const auto dir = std::filesystem::temp_directory_path() / "nfetc_synthetic_test";
  write_task(task, dir);
  const SyntheticTask back = read_task(dir);
  CHECK(back.forest == task.forest);
  CHECK(back.embeddings.rows() == task.embeddings.rows());
  CHECK(back.train.mentions == task.train.mentions);
  CHECK(back.test.mentions == task.test.mentions);
  std::filesystem::remove_all(dir);

  CHECK(make_synthetic(o).train.mentions == task.train.mentions);
}

TEST_CASE("epoch log format") {
  EpochLog e;
  e.epoch = 3;
  e.train_loss = 0.5;
  e.dev.strict = 0.25;
  CHECK(epoch_log_header() == "epoch,train_loss,dev_strict,dev_macro,dev_micro");
  CHECK(format_epoch_log(e).rfind("3,0.5", 0) == 0);
}

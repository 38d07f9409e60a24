#include "nfetc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "nfetc/error.hpp"
#include "nfetc/random.hpp"

namespace nfetc {

namespace {

std::string leaf_name(const std::string& path) { return path.substr(path.rfind('/') + 1); }

struct Lexicon {
  std::vector<std::vector<std::string>> cues;      // per type
  std::vector<std::vector<std::string>> entities;  // per type; only roots are filled
  std::vector<std::string> filler;
};

Lexicon build_lexicon(const TypeForest& forest, const SyntheticOptions& o) {
  Lexicon lex;
  lex.cues.resize(forest.size());
  lex.entities.resize(forest.size());
  for (TypeId t = 0; t < forest.size(); ++t) {
    const std::string base = leaf_name(forest.name(t)) + std::to_string(t);
    for (std::size_t j = 0; j < o.cues_per_type; ++j) {
      lex.cues[t].push_back(base + "_cue" + std::to_string(j));
    }
    if (!forest.parent(t)) {
      for (std::size_t j = 0; j < o.entities_per_root; ++j) {
        std::string name = "E" + base + "_" + std::to_string(j);
        lex.entities[t].push_back(name);
      }
    }
  }
  for (std::size_t j = 0; j < o.filler_words; ++j) lex.filler.push_back("w" + std::to_string(j));
  return lex;
}

TypeId root_of(const TypeForest& forest, TypeId t) {
  while (auto p = forest.parent(t)) t = *p;
  return t;
}

MentionTriple make_mention(const TypeForest& forest, const Lexicon& lex, TypeId gold,
                           const SyntheticOptions& o, Rng& rng) {
  const TypeSet path = expand_to_path(forest, gold);
  const std::size_t mention_len = 1 + rng.below(2);
  const std::size_t context_len =
      std::max(o.min_context + rng.below(o.max_context - o.min_context + 1), path.size() + 1);

  std::vector<std::string> context;
  for (std::size_t i = 0; i < context_len; ++i) context.push_back(lex.filler[rng.below(lex.filler.size())]);
  // Cue words at distinct random positions.
  std::vector<std::size_t> slots(context_len);
  for (std::size_t i = 0; i < context_len; ++i) slots[i] = i;
  rng.shuffle(slots);
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& pool = lex.cues[path[k]];
    context[slots[k]] = pool[rng.below(pool.size())];
  }

  const auto& names = lex.entities[root_of(forest, gold)];
  const std::size_t at = rng.below(context_len + 1);
  MentionTriple m;
  m.tokens.assign(context.begin(), context.begin() + static_cast<std::ptrdiff_t>(at));
  for (std::size_t i = 0; i < mention_len; ++i) m.tokens.push_back(names[rng.below(names.size())]);
  m.tokens.insert(m.tokens.end(), context.begin() + static_cast<std::ptrdiff_t>(at), context.end());
  m.begin = at;
  m.end = at + mention_len;
  m.labels.assign(path.begin(), path.end());
  return m;
}

TypeId draw_gold(const TypeForest& forest, const SyntheticOptions& o, Rng& rng) {
  if (o.generic_share < 0.0) return rng.below(forest.size());
  std::vector<TypeId> generic, leaves;
  for (TypeId t = 0; t < forest.size(); ++t) {
    (forest.children(t).empty() ? leaves : generic).push_back(t);
  }
  const bool pick_generic = !generic.empty() && (leaves.empty() || rng.bernoulli(o.generic_share));
  const auto& pool = pick_generic ? generic : leaves;
  return pool[rng.below(pool.size())];
}

void descendants(const TypeForest& forest, TypeId t, std::vector<TypeId>& out) {
  for (TypeId c : forest.children(t)) {
    out.push_back(c);
    descendants(forest, c, out);
  }
}

std::size_t share(double rate, std::size_t n) {
  return static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 0.5));
}

Corpus generate(const TypeForest& forest, const Lexicon& lex, std::size_t n,
                const SyntheticOptions& o, Rng& rng, Provenance provenance) {
  Corpus c;
  c.provenance = provenance;
  for (std::size_t i = 0; i < n; ++i) {
    c.mentions.push_back(make_mention(forest, lex, draw_gold(forest, o, rng), o, rng));
  }
  return c;
}

void add_overly_specific_noise(const TypeForest& forest, Corpus& corpus, double rate, Rng& rng) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const TypeId gold = terminal_labels(forest, corpus.mentions[i]).front();
    if (!forest.children(gold).empty()) eligible.push_back(i);
  }
  const std::size_t wanted = share(rate, corpus.size());
  if (wanted > eligible.size()) {
    throw Error("not enough generic mentions for the requested overly-specific noise");
  }
  rng.shuffle(eligible);
  for (std::size_t k = 0; k < wanted; ++k) {
    MentionTriple& m = corpus.mentions[eligible[k]];
    std::vector<TypeId> below;
    descendants(forest, terminal_labels(forest, m).front(), below);
    const TypeSet path = expand_to_path(forest, below[rng.below(below.size())]);
    m.labels.assign(path.begin(), path.end());
  }
}

void add_out_of_context_noise(const TypeForest& forest, Corpus& corpus, double rate, Rng& rng) {
  std::vector<std::size_t> all(corpus.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  rng.shuffle(all);
  const std::size_t wanted = share(rate, corpus.size());
  for (std::size_t k = 0; k < wanted; ++k) {
    MentionTriple& m = corpus.mentions[all[k]];
    std::vector<TypeId> off_path;
    for (TypeId t = 0; t < forest.size(); ++t) {
      std::vector<TypeId> merged = m.labels;
      merged.push_back(t);
      if (!is_single_path(forest, merged)) off_path.push_back(t);
    }
    const TypeSet extra = expand_to_path(forest, off_path[rng.below(off_path.size())]);
    TypeSet merged = m.labels;
    merged.insert(merged.end(), extra.begin(), extra.end());
    merged = make_type_set(std::move(merged));
    m.labels.assign(merged.begin(), merged.end());
  }
}

}  // namespace

SyntheticTask make_synthetic(const SyntheticOptions& o) {
  if (o.min_context == 0 || o.max_context < o.min_context) throw Error("bad context length range");
  SyntheticTask task;
  task.forest = TypeForest::parse(o.types);
  const Lexicon lex = build_lexicon(task.forest, o);
  Rng rng(o.seed);

  std::vector<std::string> words = lex.filler;
  for (const auto& pool : lex.cues) words.insert(words.end(), pool.begin(), pool.end());
  for (const auto& pool : lex.entities) words.insert(words.end(), pool.begin(), pool.end());
  std::vector<double> values;
  const double scale = 1.0 / std::sqrt(static_cast<double>(o.word_dim));
  for (std::size_t i = 0; i < words.size() * o.word_dim; ++i) {
    // Rounded so the text files reproduce the in-memory task exactly.
    values.push_back(std::round(rng.normal() * scale * 1e4) / 1e4);
  }
  const std::size_t vocab = words.size();
  task.embeddings =
      WordEmbeddings(std::move(words), Tensor::matrix(vocab, o.word_dim, std::move(values)));

  task.train = generate(task.forest, lex, o.train_size, o, rng, Provenance::train);
  task.dev = generate(task.forest, lex, o.dev_size, o, rng, Provenance::dev);
  task.test = generate(task.forest, lex, o.test_size, o, rng, Provenance::test);
  if (o.overly_specific_rate > 0.0) {
    add_overly_specific_noise(task.forest, task.train, o.overly_specific_rate, rng);
  }
  if (o.out_of_context_rate > 0.0) {
    add_out_of_context_noise(task.forest, task.train, o.out_of_context_rate, rng);
  }
  return task;
}

SyntheticOptions overfit_options() {
  SyntheticOptions o;
  o.types = {"/person",       "/person/artist", "/person/artist/actor", "/person/athlete",
             "/organization", "/organization/company", "/location", "/location/city"};
  o.train_size = 200;
  o.dev_size = 40;
  o.test_size = 100;
  o.seed = 11;
  return o;
}

SyntheticOptions overly_specific_options() {
  SyntheticOptions o;
  o.types = {"/person",         "/person/artist",       "/person/athlete",     "/person/coach",
             "/person/doctor",  "/organization",        "/organization/company",
             "/organization/team", "/organization/school", "/organization/agency",
             "/location",       "/location/city",       "/location/country",   "/location/river",
             "/location/park"};
  o.train_size = 600;
  o.dev_size = 100;
  o.test_size = 300;
  o.generic_share = 0.5;
  o.overly_specific_rate = 0.4;
  o.cues_per_type = 1;
  o.entities_per_root = 2;
  o.filler_words = 4;
  o.seed = 23;
  return o;
}

SyntheticOptions out_of_context_options() {
  SyntheticOptions o;
  o.types = {"/person",       "/person/artist",        "/person/athlete",   "/person/coach",
             "/organization", "/organization/company", "/organization/team", "/location",
             "/location/city", "/location/country"};
  o.train_size = 400;
  o.dev_size = 100;
  o.test_size = 300;
  o.cues_per_type = 1;
  o.filler_words = 10;
  o.out_of_context_rate = 0.4;
  o.seed = 31;
  return o;
}

void write_task(const SyntheticTask& task, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw Error("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("types.txt");
    for (const auto& name : task.forest.names()) out << name << '\n';
  }
  {
    auto out = open("embeddings.txt");
    write_embeddings(out, task.embeddings);
  }
  {
    auto out = open("train.txt");
    write_corpus(out, task.train, task.forest);
  }
  {
    auto out = open("dev.txt");
    write_corpus(out, task.dev, task.forest);
  }
  {
    auto out = open("test.txt");
    write_corpus(out, task.test, task.forest);
  }
}

SyntheticTask read_task(const std::filesystem::path& dir) {
  SyntheticTask task;
  task.forest = TypeForest::load(dir / "types.txt");
  task.embeddings = WordEmbeddings::load(dir / "embeddings.txt");
  task.train = parse_corpus(dir / "train.txt", task.forest);
  task.train.provenance = Provenance::train;
  task.dev = parse_corpus(dir / "dev.txt", task.forest);
  task.dev.provenance = Provenance::dev;
  task.test = parse_corpus(dir / "test.txt", task.forest);
  task.test.provenance = Provenance::test;
  return task;
}

}  // namespace nfetc

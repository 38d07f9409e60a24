#include "nfetc/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "nfetc/error.hpp"
#include "nfetc/random.hpp"

namespace nfetc {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

std::size_t parse_index(const std::string& s, const std::string& source, std::size_t line) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(source, line, "invalid span index '" + s + "'");
  }
  return value;
}

}  // namespace

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::raw: return "raw";
    case Provenance::filtered: return "filtered";
    case Provenance::train: return "train";
    case Provenance::dev: return "dev";
    case Provenance::test: return "test";
  }
  return "unknown";
}

Corpus parse_corpus(std::istream& in, const std::string& source, const TypeForest& forest,
                    bool labels_required) {
  Corpus corpus;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::vector<std::string> columns;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      columns.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (columns.size() < 2 || columns.size() > 3) {
      throw ParseError(source, n, "expected '<start> <end>\\t<tokens>\\t<labels>'");
    }

    const auto span = split_ws(columns[0]);
    if (span.size() != 2) throw ParseError(source, n, "span column must hold '<start> <end>'");
    MentionTriple m;
    m.begin = parse_index(span[0], source, n);
    m.end = parse_index(span[1], source, n);
    m.tokens = split_ws(columns[1]);
    if (m.tokens.empty()) throw ParseError(source, n, "empty token list");
    if (m.begin >= m.end || m.end > m.tokens.size()) {
      throw ParseError(source, n,
                       "span [" + span[0] + ", " + span[1] + ") out of bounds for " +
                           std::to_string(m.tokens.size()) + " tokens");
    }

    const auto labels = columns.size() == 3 ? split_ws(columns[2]) : std::vector<std::string>{};
    if (labels.empty() && labels_required) throw ParseError(source, n, "missing type labels");
    for (const auto& label : labels) {
      auto id = forest.find(label);
      if (!id) throw ParseError(source, n, "unknown type '" + label + "'");
      m.labels.push_back(*id);
    }
    corpus.mentions.push_back(std::move(m));
  }
  return corpus;
}

Corpus parse_corpus(const std::filesystem::path& file, const TypeForest& forest,
                    bool labels_required) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string(), 0, "cannot open corpus file");
  return parse_corpus(in, file.string(), forest, labels_required);
}

std::string format_mention(const MentionTriple& mention, const TypeForest& forest) {
  std::string out = std::to_string(mention.begin) + ' ' + std::to_string(mention.end) + '\t';
  for (std::size_t i = 0; i < mention.tokens.size(); ++i) {
    if (i) out += ' ';
    out += mention.tokens[i];
  }
  out += '\t';
  for (std::size_t i = 0; i < mention.labels.size(); ++i) {
    if (i) out += ' ';
    out += forest.name(mention.labels[i]);
  }
  return out;
}

void write_corpus(std::ostream& out, const Corpus& corpus, const TypeForest& forest) {
  for (const auto& m : corpus.mentions) out << format_mention(m, forest) << '\n';
}

MentionTriple window(const MentionTriple& mention, std::size_t window_size) {
  if (window_size == 0) throw Error("context window size must be at least 1");
  const std::size_t left = mention.begin > window_size ? mention.begin - window_size : 0;
  const std::size_t right = std::min(mention.tokens.size(), mention.end + window_size);
  MentionTriple out;
  out.tokens.assign(mention.tokens.begin() + left, mention.tokens.begin() + right);
  out.begin = mention.begin - left;
  out.end = mention.end - left;
  out.labels = mention.labels;
  return out;
}

Corpus window(const Corpus& corpus, std::size_t window_size) {
  Corpus out;
  out.provenance = corpus.provenance;
  out.mentions.reserve(corpus.size());
  for (const auto& m : corpus.mentions) out.mentions.push_back(window(m, window_size));
  return out;
}

TypeSet terminal_labels(const TypeForest& forest, const MentionTriple& mention) {
  return terminal_set(forest, mention.labels);
}

Corpus build_filtered(const Corpus& corpus, const TypeForest& forest) {
  Corpus out;
  out.provenance = Provenance::filtered;
  for (const auto& m : corpus.mentions) {
    if (is_single_path(forest, m.labels)) out.mentions.push_back(m);
  }
  if (out.empty()) throw Error("no single-path mentions survive filtering");
  return out;
}

CorpusStats compute_stats(const Corpus& corpus, const TypeForest& forest) {
  CorpusStats s;
  s.types = forest.size();
  s.mentions = corpus.size();
  s.forest_depth = forest.max_depth();
  for (const auto& m : corpus.mentions) {
    if (is_single_path(forest, m.labels)) ++s.single_path;
    for (TypeId t : m.labels) s.max_label_depth = std::max(s.max_label_depth, forest.depth(t));
  }
  s.filtered_percent =
      s.mentions ? 100.0 * static_cast<double>(s.single_path) / static_cast<double>(s.mentions) : 0.0;
  return s;
}

std::string stats_key_value(const CorpusStats& s) {
  std::ostringstream out;
  out << "types=" << s.types << '\n'
      << "mentions=" << s.mentions << '\n'
      << "single_path=" << s.single_path << '\n'
      << "filtered_pct=" << std::fixed << std::setprecision(2) << s.filtered_percent << '\n'
      << "max_depth=" << s.max_label_depth << '\n'
      << "forest_depth=" << s.forest_depth << '\n';
  return out.str();
}

std::string stats_json(const CorpusStats& s) {
  const nlohmann::ordered_json j{{"types", s.types},
                                 {"mentions", s.mentions},
                                 {"single_path", s.single_path},
                                 {"filtered_pct", std::round(s.filtered_percent * 100.0) / 100.0},
                                 {"max_depth", s.max_label_depth},
                                 {"forest_depth", s.forest_depth}};
  return j.dump() + "\n";
}

std::pair<Corpus, Corpus> split_dev(const Corpus& corpus, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw Error("dev fraction must lie in (0, 1)");
  const std::size_t n = corpus.size();
  const auto dev_size = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
  if (dev_size == 0 || dev_size >= n) {
    throw Error("corpus of " + std::to_string(n) + " mentions is too small for a dev split of " +
                std::to_string(fraction));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<bool> in_dev(n, false);
  for (std::size_t i = 0; i < dev_size; ++i) in_dev[order[i]] = true;

  Corpus dev, rest;
  dev.provenance = Provenance::dev;
  rest.provenance = Provenance::test;
  for (std::size_t i = 0; i < n; ++i) {
    (in_dev[i] ? dev : rest).mentions.push_back(corpus.mentions[i]);
  }
  return {std::move(dev), std::move(rest)};
}

}  // namespace nfetc

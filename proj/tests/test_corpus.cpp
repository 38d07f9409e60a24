#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nfetc/corpus.hpp"
#include "nfetc/embeddings.hpp"
#include "nfetc/error.hpp"

using namespace nfetc;

namespace {

const std::string kData = NFETC_SOURCE_DIR "/tests/data/";

TypeForest mini_forest() { return TypeForest::load(kData + "mini_types.txt"); }

Corpus parse(const std::string& text, const TypeForest& f, bool labels = true) {
  std::istringstream in(text);
  return parse_corpus(in, "<test>", f, labels);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("corpus lines parse into mention triples") {
  const TypeForest f = mini_forest();
  const Corpus c = parse("0 2\tTaylor Swift sang\t/person /person/artist\n\n", f);
  REQUIRE(c.size() == 1);
  const MentionTriple& m = c.mentions[0];
  CHECK(m.tokens == std::vector<std::string>{"Taylor", "Swift", "sang"});
  CHECK(m.begin == 0);
  CHECK(m.end == 2);
  CHECK(m.mention_length() == 2);
  CHECK(m.labels == std::vector<TypeId>{f.id("/person"), f.id("/person/artist")});
  CHECK(format_mention(m, f) == "0 2\tTaylor Swift sang\t/person /person/artist");
}

TEST_CASE("labels column is optional only when allowed") {
  const TypeForest f = mini_forest();
  CHECK(parse("1 2\tsaw Paris\n", f, false).mentions[0].labels.empty());
  CHECK_THROWS_AS(parse("1 2\tsaw Paris\n", f, true), ParseError);
}

TEST_CASE("parse errors name the line") {
  const TypeForest f = mini_forest();
  auto line_of = [&](const std::string& text) {
    try {
      parse(text, f);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("0 1\ta b\t/person\n2 1\ta b\t/person\n") == 2);
  CHECK(line_of("0 3\ta b\t/person\n") == 1);
  CHECK(line_of("0 1\ta b\t/animal\n") == 1);
  CHECK(line_of("x 1\ta b\t/person\n") == 1);
  CHECK(line_of("0 1 a b /person\n") == 1);
  CHECK(line_of("0 1\t\t/person\n") == 1);
}

TEST_CASE("write and parse round-trip") {
  const TypeForest f = mini_forest();
  const Corpus c = parse_corpus(kData + "mini_corpus.txt", f);
  std::ostringstream out;
  write_corpus(out, c, f);
  CHECK(out.str() == read_file(kData + "mini_corpus.txt"));
}

TEST_CASE("windowing keeps C tokens each side and never cuts the mention") {
  MentionTriple m;
  for (int i = 0; i < 30; ++i) m.tokens.push_back("w" + std::to_string(i));
  m.begin = 12;
  m.end = 15;
  const MentionTriple w = window(m, 4);
  CHECK(w.tokens.size() == 11);
  CHECK(w.tokens.front() == "w8");
  CHECK(w.tokens.back() == "w18");
  CHECK(w.begin == 4);
  CHECK(w.end == 7);

  const MentionTriple edge = window(m, 20);
  CHECK(edge.tokens == m.tokens);
  CHECK(edge.begin == 12);
  CHECK_THROWS(window(m, 0));
}

TEST_CASE("filtering keeps single-path mentions in order") {
  const TypeForest f = mini_forest();
  const Corpus c = parse_corpus(kData + "mini_corpus.txt", f);
  const Corpus filtered = build_filtered(c, f);
  CHECK(filtered.size() == 8);
  CHECK(filtered.provenance == Provenance::filtered);
  CHECK(filtered.mentions.front() == c.mentions.front());
  for (const auto& m : filtered.mentions) CHECK(is_single_path(f, m.labels));
  CHECK(terminal_labels(f, c.mentions[8]).size() == 2);

  const Corpus multi = parse("0 1\ta b\t/person/artist /location\n", f);
  CHECK_THROWS(build_filtered(multi, f));
}

TEST_CASE("statistics on the mini corpus match its manifest") {
  const TypeForest f = mini_forest();
  const Corpus c = parse_corpus(kData + "mini_corpus.txt", f);
  const CorpusStats s = compute_stats(c, f);
  CHECK(stats_key_value(s) == read_file(kData + "mini_manifest.txt"));
  CHECK(s.filtered_percent == doctest::Approx(200.0 / 3.0));
  CHECK(stats_json(s).find("\"single_path\":8") != std::string::npos);
}

TEST_CASE("dev split sizes, disjointness and order") {
  Corpus c;
  for (std::size_t i = 0; i < 25; ++i) {
    MentionTriple m;
    m.tokens = {"t" + std::to_string(i)};
    m.begin = 0;
    m.end = 1;
    c.mentions.push_back(m);
  }
  const auto [dev, rest] = split_dev(c, 0.1, 7);
  CHECK(dev.size() == 3);  // round-half-up(2.5)
  CHECK(rest.size() == 22);
  auto index_of = [](const MentionTriple& m) { return std::stoul(m.tokens[0].substr(1)); };
  std::vector<bool> seen(25, false);
  std::size_t last = 0;
  for (const auto& m : dev.mentions) {
    const auto i = index_of(m);
    CHECK((last == 0 || i > last));
    last = i;
    seen[i] = true;
  }
  for (const auto& m : rest.mentions) {
    CHECK_FALSE(seen[index_of(m)]);
    seen[index_of(m)] = true;
  }
  for (bool s : seen) CHECK(s);

  const auto again = split_dev(c, 0.1, 7);
  CHECK(again.first.mentions == dev.mentions);
  CHECK_THROWS(split_dev(c, 0.01, 7));
  CHECK_THROWS(split_dev(c, 0.0, 7));
}

TEST_CASE("embedding files load, look up and round-trip") {
  const WordEmbeddings e = WordEmbeddings::load(kData + "mini_embeddings.txt");
  CHECK(e.dim() == 4);
  CHECK(e.vocab_size() == 3);
  CHECK(e.lookup("Paris")[3] == 1.5);
  CHECK(e.index("Obama") == 2u);
  for (double v : e.lookup("paris")) CHECK(v == 0.0);  // case-sensitive, unknown -> zero

  std::ostringstream out;
  write_embeddings(out, e);
  std::istringstream in(out.str());
  const WordEmbeddings back = WordEmbeddings::load(in, "<round-trip>");
  CHECK(back.words() == e.words());
  CHECK(back.rows() == e.rows());
}

TEST_CASE("malformed embedding files are rejected") {
  auto load = [](const std::string& text) {
    std::istringstream in(text);
    return WordEmbeddings::load(in, "<test>");
  };
  CHECK_THROWS(load(""));
  CHECK_THROWS(load("a 1 2\nb 1\n"));
  CHECK_THROWS(load("a 1 2\na 3 4\n"));
  CHECK_THROWS(load("a 1 x\n"));
  CHECK_NOTHROW(load("a 1 2\n\nb 3 4\n"));
}

TEST_CASE("position rows clip distances and reserve a pad row") {
  CHECK(position_table_rows(10) == 22);
  CHECK(pad_position_row(10) == 21);
  CHECK(relative_distance(2, 5, 7) == -3);
  CHECK(relative_distance(5, 5, 7) == 0);
  CHECK(relative_distance(6, 5, 7) == 0);
  CHECK(relative_distance(9, 5, 7) == 3);
  CHECK(position_row(-3, 10) == 7);
  CHECK(position_row(0, 10) == 10);
  CHECK(position_row(-40, 10) == 0);
  CHECK(position_row(40, 10) == 20);

  Rng rng(1);
  const Tensor table = init_position_table(2, 3, rng);
  CHECK(table.shape() == Shape{6, 3});
  for (double v : table.values()) CHECK(std::abs(v) <= 0.25);
  const auto row = position_vector(table, 0, 4, 5, 2);  // distance -4 clips to -2 -> row 0
  CHECK(row[0] == table.at(0, 0));
  CHECK_THROWS(position_vector(table, 0, 4, 5, 3));
}

#include "nfetc/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "nfetc/error.hpp"

namespace nfetc {

WordEmbeddings::WordEmbeddings(std::vector<std::string> words, Tensor rows)
    : words_(std::move(words)), rows_(std::move(rows)) {
  if (rows_.rank() != 2 || rows_.rows() != words_.size()) {
    throw ShapeError("embedding matrix must have one row per word");
  }
  zero_.assign(rows_.cols(), 0.0);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) throw Error("duplicate word '" + words_[i] + "'");
  }
}

WordEmbeddings WordEmbeddings::load(std::istream& in, const std::string& source) {
  std::vector<std::string> words;
  std::vector<double> values;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t dim = 0;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::size_t count = 0;
    std::string token;
    while (fields >> token) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError(source, n, "invalid number '" + token + "'");
      }
      values.push_back(v);
      ++count;
    }
    if (count == 0) throw ParseError(source, n, "word '" + word + "' has no vector");
    if (dim == 0) dim = count;
    if (count != dim) {
      throw ParseError(source, n,
                       "expected " + std::to_string(dim) + " values, got " + std::to_string(count));
    }
    if (!seen.emplace(word, words.size()).second) {
      throw ParseError(source, n, "duplicate word '" + word + "'");
    }
    words.push_back(std::move(word));
  }
  if (words.empty()) throw ParseError(source, 0, "no embeddings found");
  const std::size_t rows = words.size();
  return WordEmbeddings(std::move(words), Tensor::matrix(rows, dim, std::move(values)));
}

WordEmbeddings WordEmbeddings::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string(), 0, "cannot open embedding file");
  return load(in, file.string());
}

std::optional<std::size_t> WordEmbeddings::index(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> WordEmbeddings::lookup(std::string_view word) const {
  if (auto i = index(word)) return {rows_.data() + *i * dim(), dim()};
  return zero_;
}

void write_embeddings(std::ostream& out, const WordEmbeddings& embeddings) {
  char buffer[64];
  for (std::size_t i = 0; i < embeddings.vocab_size(); ++i) {
    out << embeddings.words()[i];
    for (double v : embeddings.lookup(embeddings.words()[i])) {
      auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
      out << ' ' << std::string_view(buffer, ptr - buffer);
    }
    out << '\n';
  }
}

std::size_t position_table_rows(std::size_t window) { return 2 * window + 2; }
std::size_t pad_position_row(std::size_t window) { return 2 * window + 1; }

std::ptrdiff_t relative_distance(std::size_t i, std::size_t begin, std::size_t end) {
  if (begin >= end) throw Error("invalid mention span");
  const auto pos = static_cast<std::ptrdiff_t>(i);
  if (i < begin) return pos - static_cast<std::ptrdiff_t>(begin);
  if (i >= end) return pos - static_cast<std::ptrdiff_t>(end - 1);
  return 0;
}

std::size_t position_row(std::ptrdiff_t distance, std::size_t window) {
  const auto c = static_cast<std::ptrdiff_t>(window);
  return static_cast<std::size_t>(std::clamp(distance, -c, c) + c);
}

Tensor init_position_table(std::size_t window, std::size_t dim, Rng& rng) {
  Tensor table({position_table_rows(window), dim});
  for (double& v : table.values()) v = rng.uniform(-0.25, 0.25);
  return table;
}

std::span<const double> position_vector(const Tensor& table, std::size_t i, std::size_t begin,
                                        std::size_t end, std::size_t window) {
  if (table.rows() != position_table_rows(window)) {
    throw ShapeError("position table does not match window size");
  }
  const std::size_t r = position_row(relative_distance(i, begin, end), window);
  return {table.data() + r * table.cols(), table.cols()};
}

}  // namespace nfetc

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nfetc/random.hpp"
#include "nfetc/tensor.hpp"

namespace nfetc {

/// Frozen pre-trained word vectors, one row per vocabulary entry. Lookups are
/// case-sensitive; unknown words resolve to the zero vector.
class WordEmbeddings {
 public:
  WordEmbeddings() = default;
  WordEmbeddings(std::vector<std::string> words, Tensor rows);

  // Whitespace-separated text, `word v1 ... vd` per line, no header line.
  static WordEmbeddings load(const std::filesystem::path& file);
  static WordEmbeddings load(std::istream& in, const std::string& source);

  std::size_t dim() const { return rows_.cols(); }
  std::size_t vocab_size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const Tensor& rows() const { return rows_; }

  std::optional<std::size_t> index(std::string_view word) const;
  std::span<const double> lookup(std::string_view word) const;

 private:
  std::vector<std::string> words_;
  Tensor rows_;
  std::vector<double> zero_;
  std::unordered_map<std::string, std::size_t> index_;
};

void write_embeddings(std::ostream& out, const WordEmbeddings& embeddings);

// Word-position table layout: rows 0..2C hold clipped distances -C..C, row
// 2C+1 is reserved for tokens outside the context (mention padding).
std::size_t position_table_rows(std::size_t window);
std::size_t pad_position_row(std::size_t window);

/// Signed distance from token i to the mention span [begin, end): zero inside,
/// otherwise measured to the nearest mention boundary.
std::ptrdiff_t relative_distance(std::size_t i, std::size_t begin, std::size_t end);
std::size_t position_row(std::ptrdiff_t distance, std::size_t window);

Tensor init_position_table(std::size_t window, std::size_t dim, Rng& rng);

std::span<const double> position_vector(const Tensor& table, std::size_t i, std::size_t begin,
                                        std::size_t end, std::size_t window);

}  // namespace nfetc

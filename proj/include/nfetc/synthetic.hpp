#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nfetc/corpus.hpp"
#include "nfetc/embeddings.hpp"
#include "nfetc/type_forest.hpp"

namespace nfetc {

/// Generator for small, fully controlled typing tasks. Every mention's context
/// holds one cue word for each type on its gold path, a mention drawn from its
/// root type's entity names, and filler words. Gold labels are full paths.
struct SyntheticOptions {
  std::vector<std::string> types;
  std::size_t train_size = 200;
  std::size_t dev_size = 50;
  std::size_t test_size = 200;
  // Probability that a gold type is drawn from the non-leaf types; negative
  // draws uniformly over all types.
  double generic_share = -1.0;
  // Share of training mentions whose generic gold type is replaced by a random
  // proper descendant (counted over the whole training set).
  double overly_specific_rate = 0.0;
  // Share of training mentions that gain the full path of an unrelated type.
  double out_of_context_rate = 0.0;
  std::size_t word_dim = 16;
  std::size_t cues_per_type = 3;
  std::size_t entities_per_root = 8;
  std::size_t filler_words = 30;
  std::size_t min_context = 6;
  std::size_t max_context = 14;
  std::uint64_t seed = 7;
};

struct SyntheticTask {
  TypeForest forest;
  WordEmbeddings embeddings;
  Corpus train;
  Corpus dev;
  Corpus test;
};

SyntheticTask make_synthetic(const SyntheticOptions& options);

// 200 clean single-path mentions over an 8-type, depth-3 forest.
SyntheticOptions overfit_options();
// 40% of training mentions relabelled with an overly specific type.
SyntheticOptions overly_specific_options();
// 40% of training mentions carry an extra off-path type.
SyntheticOptions out_of_context_options();

/// Writes types.txt, embeddings.txt, train.txt, dev.txt and test.txt.
void write_task(const SyntheticTask& task, const std::filesystem::path& dir);
SyntheticTask read_task(const std::filesystem::path& dir);

}  // namespace nfetc

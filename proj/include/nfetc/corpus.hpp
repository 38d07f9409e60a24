#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nfetc/type_forest.hpp"

namespace nfetc {

/// One labeled entity mention: its context tokens, the mention span
/// [begin, end) into those tokens, and the candidate type set as listed.
struct MentionTriple {
  std::vector<std::string> tokens;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<TypeId> labels;

  std::size_t mention_length() const { return end - begin; }
  bool operator==(const MentionTriple&) const = default;
};

enum class Provenance { raw, filtered, train, dev, test };

const char* to_string(Provenance p);

struct Corpus {
  std::vector<MentionTriple> mentions;
  Provenance provenance = Provenance::raw;

  std::size_t size() const { return mentions.size(); }
  bool empty() const { return mentions.empty(); }
};

/// Reads the line format `<start> <end>\t<tokens>\t<labels>` (0-based, end
/// exclusive). With `labels_required` false the label column may be absent.
Corpus parse_corpus(std::istream& in, const std::string& source, const TypeForest& forest,
                    bool labels_required = true);
Corpus parse_corpus(const std::filesystem::path& file, const TypeForest& forest,
                    bool labels_required = true);

std::string format_mention(const MentionTriple& mention, const TypeForest& forest);
void write_corpus(std::ostream& out, const Corpus& corpus, const TypeForest& forest);

/// Keeps at most `window_size` tokens on each side of the mention. The mention
/// itself is never cut and no padding is added.
MentionTriple window(const MentionTriple& mention, std::size_t window_size);
Corpus window(const Corpus& corpus, std::size_t window_size);

TypeSet terminal_labels(const TypeForest& forest, const MentionTriple& mention);

/// Mentions whose candidate labels form a single type-path, in input order.
/// Throws if nothing survives.
Corpus build_filtered(const Corpus& corpus, const TypeForest& forest);

struct CorpusStats {
  std::size_t types = 0;            // K
  std::size_t mentions = 0;         // N
  std::size_t single_path = 0;      // mentions surviving build_filtered
  double filtered_percent = 0.0;    // 100 * single_path / mentions
  std::size_t max_label_depth = 0;  // deepest label observed in the corpus
  std::size_t forest_depth = 0;     // deepest type in the forest
};

CorpusStats compute_stats(const Corpus& corpus, const TypeForest& forest);
std::string stats_key_value(const CorpusStats& stats);
std::string stats_json(const CorpusStats& stats);

/// Uniform sample without replacement of round-half-up(fraction * N) mentions
/// for development; the rest is returned for evaluation. Both keep input order.
std::pair<Corpus, Corpus> split_dev(const Corpus& corpus, double fraction, std::uint64_t seed);

}  // namespace nfetc

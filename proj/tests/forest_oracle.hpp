#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "nfetc/random.hpp"
#include "nfetc/type_forest.hpp"

namespace nfetc::testing {

// Random type paths: up to `max_types` types, no deeper than `max_depth`,
// listed in shuffled order so parents may appear after their children.
inline std::vector<std::string> random_type_paths(Rng& rng, std::size_t max_types,
                                                  std::size_t max_depth) {
  const std::size_t n = 1 + rng.below(max_types);
  std::vector<std::string> paths;
  std::vector<std::size_t> depth;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> parents;
    for (std::size_t j = 0; j < paths.size(); ++j) {
      if (depth[j] < max_depth) parents.push_back(j);
    }
    const std::size_t pick = rng.below(parents.size() + 1);
    const std::string leaf = "/t" + std::to_string(i);
    if (pick == parents.size()) {
      paths.push_back(leaf);
      depth.push_back(1);
    } else {
      paths.push_back(paths[parents[pick]] + leaf);
      depth.push_back(depth[parents[pick]] + 1);
    }
  }
  rng.shuffle(paths);
  return paths;
}

// Set algebra on path strings alone: a is an ancestor of b iff a is a proper
// segment prefix of b.
inline bool prefix_ancestor(const std::string& a, const std::string& b) {
  return b.size() > a.size() && b.compare(0, a.size(), a) == 0 && b[a.size()] == '/';
}

inline std::set<std::string> prefix_closure(const std::set<std::string>& labels) {
  std::set<std::string> out;
  for (const std::string& p : labels) {
    for (std::size_t i = 1; i <= p.size(); ++i) {
      if (i == p.size() || p[i] == '/') out.insert(p.substr(0, i));
    }
  }
  return out;
}

inline std::set<std::string> prefix_terminals(const std::set<std::string>& labels) {
  std::set<std::string> out;
  for (const std::string& a : labels) {
    bool covered = false;
    for (const std::string& b : labels) covered = covered || prefix_ancestor(a, b);
    if (!covered) out.insert(a);
  }
  return out;
}

inline bool prefix_single_path(const std::set<std::string>& labels) {
  for (const std::string& a : labels) {
    for (const std::string& b : labels) {
      if (a != b && !prefix_ancestor(a, b) && !prefix_ancestor(b, a)) return false;
    }
  }
  return true;
}

inline std::set<std::string> names_of(const TypeForest& forest, const TypeSet& ids) {
  std::set<std::string> out;
  for (TypeId id : ids) out.insert(forest.name(id));
  return out;
}

inline TypeSet random_labels(const TypeForest& forest, Rng& rng, std::size_t max_size) {
  std::vector<TypeId> out;
  const std::size_t n = 1 + rng.below(max_size);
  for (std::size_t i = 0; i < n; ++i) out.push_back(rng.below(forest.size()));
  return make_type_set(std::move(out));
}

}  // namespace nfetc::testing

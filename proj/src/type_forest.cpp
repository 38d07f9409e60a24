#include "nfetc/type_forest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "nfetc/error.hpp"

namespace nfetc {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string parent_path(const std::string& path) {
  const auto cut = path.rfind('/');
  return cut == 0 ? std::string() : path.substr(0, cut);
}

}  // namespace

TypeSet make_type_set(std::vector<TypeId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<std::string> split_type_path(std::string_view path) {
  if (path.empty() || path.front() != '/') {
    throw Error("malformed type path '" + std::string(path) + "': must start with '/'");
  }
  std::vector<std::string> segments;
  std::size_t start = 1;
  while (true) {
    const auto next = path.find('/', start);
    const auto segment = path.substr(start, next == std::string_view::npos ? next : next - start);
    if (segment.empty()) {
      throw Error("malformed type path '" + std::string(path) + "': empty segment");
    }
    if (segment.find_first_of(" \t\r\n") != std::string_view::npos) {
      throw Error("malformed type path '" + std::string(path) + "': contains whitespace");
    }
    segments.emplace_back(segment);
    if (next == std::string_view::npos) break;
    start = next + 1;
  }
  return segments;
}

TypeId TypeForest::insert(const std::string& path) {
  if (auto it = index_.find(path); it != index_.end()) return it->second;
  std::optional<TypeId> parent;
  const std::string up = parent_path(path);
  if (!up.empty()) parent = insert(up);
  const TypeId id = names_.size();
  names_.push_back(path);
  parent_.push_back(parent);
  depth_.push_back(parent ? depth_[*parent] + 1 : 1);
  children_.emplace_back();
  if (parent) children_[*parent].push_back(id);
  index_.emplace(path, id);
  return id;
}

TypeForest TypeForest::parse(std::span<const std::string> paths, std::size_t max_depth) {
  TypeForest forest;
  std::set<std::string> listed;
  for (const auto& path : paths) {
    split_type_path(path);
    if (!listed.insert(path).second) throw Error("duplicate type '" + path + "'");
    const TypeId id = forest.insert(path);
    if (max_depth && forest.depth(id) > max_depth) {
      throw Error("type '" + path + "' exceeds maximum depth " + std::to_string(max_depth));
    }
  }
  return forest;
}

TypeForest TypeForest::load(const std::filesystem::path& file, std::size_t max_depth) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string(), 0, "cannot open type file");
  std::vector<std::string> paths;
  std::vector<std::size_t> lines;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    std::string entry = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (entry.empty()) continue;
    paths.push_back(std::move(entry));
    lines.push_back(n);
  }
  // Re-parse incrementally so an error can name its line.
  for (std::size_t i = 0; i < paths.size(); ++i) {
    try {
      split_type_path(paths[i]);
    } catch (const Error& e) {
      throw ParseError(file.string(), lines[i], e.what());
    }
  }
  try {
    return parse(paths, max_depth);
  } catch (const Error& e) {
    throw ParseError(file.string(), 0, e.what());
  }
}

void TypeForest::check_id(TypeId id) const {
  if (id >= names_.size()) throw Error("unknown type id " + std::to_string(id));
}

std::optional<TypeId> TypeForest::find(std::string_view path) const {
  auto it = index_.find(std::string(path));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TypeId TypeForest::id(std::string_view path) const {
  if (auto found = find(path)) return *found;
  throw Error("unknown type '" + std::string(path) + "'");
}

std::optional<TypeId> TypeForest::parent(TypeId id) const {
  check_id(id);
  return parent_[id];
}

std::size_t TypeForest::max_depth() const {
  std::size_t d = 0;
  for (auto v : depth_) d = std::max(d, v);
  return d;
}

std::vector<TypeId> TypeForest::roots() const {
  std::vector<TypeId> out;
  for (TypeId i = 0; i < names_.size(); ++i) {
    if (!parent_[i]) out.push_back(i);
  }
  return out;
}

std::vector<TypeId> TypeForest::ancestors(TypeId id) const {
  check_id(id);
  std::vector<TypeId> out;
  for (auto p = parent_[id]; p; p = parent_[*p]) out.push_back(*p);
  return out;
}

bool TypeForest::is_ancestor(TypeId a, TypeId b) const {
  check_id(a);
  check_id(b);
  for (auto p = parent_[b]; p; p = parent_[*p]) {
    if (*p == a) return true;
  }
  return false;
}

TypeSet ancestor_set(const TypeForest& forest, TypeId id) {
  return make_type_set(forest.ancestors(id));
}

TypeSet terminal_set(const TypeForest& forest, std::span<const TypeId> labels) {
  if (labels.empty()) throw Error("terminal_set of an empty label set");
  TypeSet members = make_type_set({labels.begin(), labels.end()});
  TypeSet out;
  for (TypeId candidate : members) {
    const bool covered = std::any_of(members.begin(), members.end(), [&](TypeId other) {
      return forest.is_ancestor(candidate, other);
    });
    if (!covered) out.push_back(candidate);
  }
  return out;
}

bool is_single_path(const TypeForest& forest, std::span<const TypeId> labels) {
  if (labels.empty()) return false;
  const TypeSet terminals = terminal_set(forest, labels);
  if (terminals.size() != 1) return false;
  const TypeSet path = expand_to_path(forest, terminals.front());
  return std::all_of(labels.begin(), labels.end(), [&](TypeId t) {
    return std::binary_search(path.begin(), path.end(), t);
  });
}

TypeSet expand_to_path(const TypeForest& forest, TypeId id) {
  std::vector<TypeId> out = forest.ancestors(id);
  out.push_back(id);
  return make_type_set(std::move(out));
}

RefinementMap::RefinementMap(std::vector<std::pair<std::string, std::string>> entries)
    : entries_(std::move(entries)) {
  std::set<std::string> sources, targets;
  for (const auto& [from, to] : entries_) {
    split_type_path(from);
    split_type_path(to);
    if (!sources.insert(from).second) {
      throw Error("refinement map is not one-to-one: '" + from + "' mapped twice");
    }
    if (!targets.insert(to).second) {
      throw Error("refinement map is not one-to-one: '" + to + "' is the image of two types");
    }
  }
}

RefinementMap RefinementMap::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string(), 0, "cannot open refinement file");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    const std::string body = hash == std::string::npos ? line : line.substr(0, hash);
    if (trim(body).empty()) continue;
    const auto tab = body.find('\t');
    if (tab == std::string::npos) throw ParseError(file.string(), n, "expected '<old>\\t<new>'");
    std::string from = trim(body.substr(0, tab));
    std::string to = trim(body.substr(tab + 1));
    try {
      split_type_path(from);
      split_type_path(to);
    } catch (const Error& e) {
      throw ParseError(file.string(), n, e.what());
    }
    entries.emplace_back(std::move(from), std::move(to));
  }
  try {
    return RefinementMap(std::move(entries));
  } catch (const Error& e) {
    throw ParseError(file.string(), 0, e.what());
  }
}

TypeForest apply_refinement(const TypeForest& forest, const RefinementMap& map) {
  std::map<std::string, std::string> rename;
  for (const auto& [from, to] : map.entries()) {
    if (!forest.find(from)) throw Error("refinement source '" + from + "' is not in the forest");
    if (to.size() > from.size() && to.compare(0, from.size() + 1, from + "/") == 0) {
      throw Error("refinement '" + from + "' -> '" + to + "' would place a type under itself");
    }
    rename.emplace(from, to);
  }

  // Each type takes the rename of its nearest mapped ancestor-or-self.
  std::vector<std::string> renamed(forest.size());
  for (TypeId id = 0; id < forest.size(); ++id) {
    const std::string& name = forest.name(id);
    renamed[id] = name;
    for (auto cursor = std::optional<TypeId>(id); cursor; cursor = forest.parent(*cursor)) {
      auto hit = rename.find(forest.name(*cursor));
      if (hit != rename.end()) {
        renamed[id] = hit->second + name.substr(hit->first.size());
        break;
      }
    }
  }

  TypeForest out;
  for (TypeId id = 0; id < renamed.size(); ++id) {
    if (!out.index_.emplace(renamed[id], id).second) {
      throw Error("refinement is not one-to-one: two types map to '" + renamed[id] + "'");
    }
  }
  out.names_ = renamed;
  out.parent_.resize(renamed.size());
  out.children_.resize(renamed.size());
  for (TypeId id = 0; id < renamed.size(); ++id) {
    const std::string up = parent_path(renamed[id]);
    if (up.empty()) continue;
    auto p = out.index_.find(up);
    if (p == out.index_.end()) {
      throw Error("refinement would need type '" + up + "' which is not in the forest");
    }
    out.parent_[id] = p->second;
    out.children_[p->second].push_back(id);
  }
  out.depth_.resize(renamed.size());
  for (TypeId id = 0; id < renamed.size(); ++id) {
    out.depth_[id] = split_type_path(renamed[id]).size();
  }
  return out;
}

}  // namespace nfetc

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace nfetc {

using TypeId = std::size_t;

class RefinementMap;

/// Sorted, duplicate-free list of type ids.
using TypeSet = std::vector<TypeId>;

TypeSet make_type_set(std::vector<TypeId> ids);

/// A forest of slash-path types ("/person/coach"). The virtual root above the
/// top-level types is implicit and never a member. Ids are dense 0..K-1 in
/// order of first appearance; an intermediate type implied by a deeper path
/// gets its id just before the first type that implies it.
class TypeForest {
 public:
  TypeForest() = default;

  // `max_depth` of 0 means unlimited.
  static TypeForest parse(std::span<const std::string> paths, std::size_t max_depth = 0);
  // One path per line; blank lines and '#' comments ignored.
  static TypeForest load(const std::filesystem::path& file, std::size_t max_depth = 0);

  std::size_t size() const { return names_.size(); }
  const std::string& name(TypeId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<TypeId> find(std::string_view path) const;
  TypeId id(std::string_view path) const;  // throws on unknown type

  std::optional<TypeId> parent(TypeId id) const;
  std::size_t depth(TypeId id) const { return depth_.at(id); }  // top-level types have depth 1
  std::size_t max_depth() const;
  std::vector<TypeId> roots() const;
  const std::vector<TypeId>& children(TypeId id) const { return children_.at(id); }

  // Proper ancestors of `id`, nearest first, excluding the virtual root.
  std::vector<TypeId> ancestors(TypeId id) const;
  // True iff `a` is a proper ancestor of `b`.
  bool is_ancestor(TypeId a, TypeId b) const;

  bool operator==(const TypeForest& other) const { return names_ == other.names_; }

 private:
  friend TypeForest apply_refinement(const TypeForest&, const RefinementMap&);

  TypeId insert(const std::string& path);
  void check_id(TypeId id) const;

  std::vector<std::string> names_;
  std::vector<std::optional<TypeId>> parent_;
  std::vector<std::size_t> depth_;
  std::vector<std::vector<TypeId>> children_;
  std::unordered_map<std::string, TypeId> index_;
};

// Validates a slash-path and returns its segments.
std::vector<std::string> split_type_path(std::string_view path);

TypeSet ancestor_set(const TypeForest& forest, TypeId id);
// Members of `labels` that are not a proper ancestor of another member.
TypeSet terminal_set(const TypeForest& forest, std::span<const TypeId> labels);
// True iff the labels lie on a single root-to-terminal chain.
bool is_single_path(const TypeForest& forest, std::span<const TypeId> labels);
// {id} together with all of its ancestors.
TypeSet expand_to_path(const TypeForest& forest, TypeId id);

/// One-to-one renaming of types, e.g. "/software" -> "/product/software".
class RefinementMap {
 public:
  RefinementMap() = default;
  explicit RefinementMap(std::vector<std::pair<std::string, std::string>> entries);

  // Two tab-separated columns per line: old type, new type.
  static RefinementMap load(const std::filesystem::path& file);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Renames types (and their descendants, by prefix) according to `map`. Ids are
/// preserved, so label ids of any corpus parsed against `forest` stay valid.
TypeForest apply_refinement(const TypeForest& forest, const RefinementMap& map);

}  // namespace nfetc

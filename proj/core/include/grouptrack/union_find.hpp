#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace grouptrack {

/// Disjoint-set forest over items 0..n-1 with path compression and union by rank.
class UnionFind {
 public:
  UnionFind() = default;
  explicit UnionFind(std::size_t count);

  std::size_t size() const noexcept { return parent_.size(); }

  /// Root of `i`; re-parents every visited node directly onto the root.
  std::size_t find(std::size_t i);

  /// Root of `i` without modifying the forest.
  std::size_t find_root(std::size_t i) const;

  /// Merges the sets of `a` and `b`, returning the surviving root.
  std::size_t unite(std::size_t a, std::size_t b);

  bool same(std::size_t a, std::size_t b) { return find(a) == find(b); }

  std::size_t parent(std::size_t i) const;
  std::size_t rank(std::size_t i) const;
  /// Member count; only meaningful when `root` is a root.
  std::size_t set_size(std::size_t root) const;
  bool is_root(std::size_t i) const { return parent(i) == i; }

  /// Total parent links followed by find() since construction.
  std::uint64_t pointer_chases() const noexcept { return chases_; }
  std::uint64_t find_calls() const noexcept { return finds_; }

  /// Compresses every path so that parent(i) is a root for all i.
  void flatten();

 private:
  void check(std::size_t i) const;

  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
  std::vector<std::size_t> size_;
  std::uint64_t chases_ = 0;
  std::uint64_t finds_ = 0;
};

}  // namespace grouptrack

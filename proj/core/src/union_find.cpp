#include "grouptrack/union_find.hpp"

#include <numeric>
#include <string>
#include <utility>

#include "grouptrack/error.hpp"

namespace grouptrack {

UnionFind::UnionFind(std::size_t count) : parent_(count), rank_(count, 0), size_(count, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

void UnionFind::check(std::size_t i) const {
  if (i >= parent_.size()) {
    throw InvalidInput("union-find item " + std::to_string(i) + " out of range (size " +
                       std::to_string(parent_.size()) + ")");
  }
}

std::size_t UnionFind::find(std::size_t i) {
  check(i);
  ++finds_;
  std::size_t root = i;
  while (parent_[root] != root) {
    root = parent_[root];
    ++chases_;
  }
  while (parent_[i] != root) {
    i = std::exchange(parent_[i], root);
  }
  return root;
}

std::size_t UnionFind::find_root(std::size_t i) const {
  check(i);
  while (parent_[i] != i) {
    i = parent_[i];
  }
  return i;
}

std::size_t UnionFind::unite(std::size_t a, std::size_t b) {
  std::size_t ra = find(a);
  std::size_t rb = find(b);
  if (ra == rb) {
    return ra;
  }
  if (rank_[ra] < rank_[rb]) {
    std::swap(ra, rb);
  }
  parent_[rb] = ra;
  size_[ra] += size_[rb];
  if (rank_[ra] == rank_[rb]) {
    ++rank_[ra];
  }
  return ra;
}

std::size_t UnionFind::parent(std::size_t i) const {
  check(i);
  return parent_[i];
}

std::size_t UnionFind::rank(std::size_t i) const {
  check(i);
  return rank_[i];
}

std::size_t UnionFind::set_size(std::size_t root) const {
  check(root);
  return size_[root];
}

void UnionFind::flatten() {
  for (std::size_t i = 0; i < parent_.size(); ++i) {
    parent_[i] = find_root(i);
  }
}

}  // namespace grouptrack

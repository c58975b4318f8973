#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "grouptrack/features.hpp"
#include "grouptrack/types.hpp"
#include "grouptrack/union_find.hpp"

namespace grouptrack {

struct GroupingConfig {
  /// Side of the square neighbour window centred on a feature (px).
  double window = 30.0;
  std::size_t min_group = 5;
  std::size_t max_group = 35;
  double max_bbox_side = 90.0;
  std::uint64_t seed = 42;

  /// Throws ConfigError when the invariants do not hold.
  void validate() const;
};

/// A disjoint set of nearby features, the unit of the local motion model.
struct FeatureGroup {
  int id = 0;
  std::size_t root = 0;     // union-find representative
  std::vector<int> members;  // ascending feature ids
  Point2 centroid;
  BoundingBox bbox;

  std::size_t size() const noexcept { return members.size(); }

  friend bool operator==(const FeatureGroup&, const FeatureGroup&) = default;
};

/// Builds a group from member ids, filling centroid and bbox.
FeatureGroup make_group(int id, std::size_t root, std::vector<int> members, const std::vector<Feature>& features);

struct Grouping {
  std::vector<FeatureGroup> groups;
  UnionFind sets;
  std::vector<int> membership;  // group index per feature, -1 when not retained

  /// Union-find root of the feature's group, or nullopt if it was discarded.
  std::optional<std::size_t> group_of(std::size_t feature_id) const;
};

/// Random seed-pick order: Fisher-Yates over 0..count-1 driven by raw mt19937_64 output.
std::vector<std::size_t> seed_order(std::size_t count, std::uint64_t seed);

/// Region-growing grouping.
///
/// Seeds are drawn in seed_order(); each new group grows breadth-first through an
/// auxiliary queue, absorbing every unassigned feature within Chebyshev radius
/// window/2 of the popped feature, in ascending id order. Growth stops at
/// max_group members; a feature whose absorption would stretch the bbox past
/// max_bbox_side is left unassigned and can seed a later group. Groups smaller
/// than min_group are dropped and their features stay consumed.
Grouping group_features(const FrameFeatures& frame, const GroupingConfig& config);

}  // namespace grouptrack

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "grouptrack/clustering.hpp"
#include "grouptrack/features.hpp"
#include "grouptrack/matching.hpp"
#include "grouptrack/types.hpp"

namespace grouptrack {

inline constexpr double kDefaultSearchMargin = 30.0;

/// Constant-velocity motion of a group centroid, in px per frame.
struct MotionProxy {
  Point2 displacement;
  int age = 0;  // frames since the group was first tracked

  friend bool operator==(const MotionProxy&, const MotionProxy&) = default;
};

/// Axis-aligned region where a group is expected in the next frame.
struct SearchRegion {
  Point2 center;
  Point2 half_extent;

  /// Closed-interval overlap test.
  bool overlaps(const BoundingBox& box) const {
    return box.min.x <= center.x + half_extent.x && box.max.x >= center.x - half_extent.x &&
           box.min.y <= center.y + half_extent.y && box.max.y >= center.y - half_extent.y;
  }

  friend bool operator==(const SearchRegion&, const SearchRegion&) = default;
};

/// Groups of the most recent frame together with their motion state. The
/// vectors `groups`, `proxies` and `regions` are parallel.
struct TrackState {
  int frame_index = 0;
  FrameFeatures frame;
  std::vector<FeatureGroup> groups;
  std::vector<std::optional<MotionProxy>> proxies;
  std::vector<SearchRegion> regions;

  bool empty() const noexcept { return groups.empty(); }
  int age(std::size_t group) const { return proxies[group] ? proxies[group]->age : 0; }
};

/// Centre is the centroid shifted by the proxy displacement (zero without a
/// proxy); half extent is the bbox half size plus `margin` on each axis.
SearchRegion predict_search_region(const FeatureGroup& group, const std::optional<MotionProxy>& proxy, double margin);

/// Every (prev, curr) whose curr bbox overlaps prev's search region, sorted by
/// (group_prev, group_curr).
std::vector<CandidatePair> intersect_candidates(std::span<const FeatureGroup> groups_curr, const TrackState& state);

/// Initial state for the first frame: no proxies, regions built with twice the margin.
TrackState bootstrap(FrameFeatures frame, std::vector<FeatureGroup> groups, double margin = kDefaultSearchMargin);

/// Moves the state to the current frame. A current group inherits motion from
/// its best-scoring accepted partner (lower prev id on ties); unmatched groups
/// start over without a proxy; unmatched previous groups are dropped.
TrackState advance(const TrackState& state, FrameFeatures frame_curr, std::vector<FeatureGroup> groups_curr,
                   std::span<const GroupMatch> accepted, double margin = kDefaultSearchMargin);

/// Recomputes regions with twice the margin, keeping groups and proxies. Used
/// when a frame cannot be matched and the state has to bridge the gap.
TrackState widen(TrackState state, double margin = kDefaultSearchMargin);

}  // namespace grouptrack

#include "grouptrack/tracking.hpp"

#include <algorithm>
#include <cmath>

#include "grouptrack/error.hpp"

namespace grouptrack {

SearchRegion predict_search_region(const FeatureGroup& group, const std::optional<MotionProxy>& proxy, double margin) {
  if (!(margin > 0.0)) {
    throw InvalidInput("search margin must be positive");
  }
  const Point2 shift = proxy ? proxy->displacement : Point2{};
  const Point2 half = group.bbox.half_size();
  return {group.centroid + shift, {half.x + margin, half.y + margin}};
}

std::vector<CandidatePair> intersect_candidates(std::span<const FeatureGroup> groups_curr, const TrackState& state) {
  if (state.regions.size() != state.groups.size()) {
    throw InvalidInput("track state regions are not aligned with its groups");
  }
  std::vector<CandidatePair> pairs;
  for (std::size_t p = 0; p < state.regions.size(); ++p) {
    const SearchRegion& region = state.regions[p];
    for (std::size_t c = 0; c < groups_curr.size(); ++c) {
      if (region.overlaps(groups_curr[c].bbox)) {
        pairs.push_back({state.groups[p].id, groups_curr[c].id});
      }
    }
  }
  return pairs;
}

namespace {

void compute_regions(TrackState& state, double margin) {
  state.regions.clear();
  state.regions.reserve(state.groups.size());
  for (std::size_t i = 0; i < state.groups.size(); ++i) {
    state.regions.push_back(predict_search_region(state.groups[i], state.proxies[i], margin));
  }
}

}  // namespace

TrackState bootstrap(FrameFeatures frame, std::vector<FeatureGroup> groups, double margin) {
  TrackState state;
  state.frame_index = frame.frame_index;
  state.frame = std::move(frame);
  state.groups = std::move(groups);
  state.proxies.assign(state.groups.size(), std::nullopt);
  compute_regions(state, 2.0 * margin);
  return state;
}

TrackState advance(const TrackState& state, FrameFeatures frame_curr, std::vector<FeatureGroup> groups_curr,
                   std::span<const GroupMatch> accepted, double margin) {
  // Best accepted partner per current group.
  std::vector<const GroupMatch*> best(groups_curr.size(), nullptr);
  for (const GroupMatch& m : accepted) {
    if (m.group_prev < 0 || static_cast<std::size_t>(m.group_prev) >= state.groups.size() || m.group_curr < 0 ||
        static_cast<std::size_t>(m.group_curr) >= groups_curr.size()) {
      throw InvalidInput("accepted match references an unknown group");
    }
    if (!m.accepted) {
      continue;
    }
    const GroupMatch*& slot = best[m.group_curr];
    if (!slot || m.score > slot->score || (m.score == slot->score && m.group_prev < slot->group_prev)) {
      slot = &m;
    }
  }

  TrackState next;
  next.frame_index = state.frame_index + 1;
  next.frame = std::move(frame_curr);
  next.groups = std::move(groups_curr);
  next.proxies.assign(next.groups.size(), std::nullopt);
  for (std::size_t c = 0; c < next.groups.size(); ++c) {
    if (!best[c]) {
      continue;
    }
    const std::size_t p = static_cast<std::size_t>(best[c]->group_prev);
    next.proxies[c] = MotionProxy{next.groups[c].centroid - state.groups[p].centroid, state.age(p) + 1};
  }
  compute_regions(next, margin);
  return next;
}

TrackState widen(TrackState state, double margin) {
  compute_regions(state, 2.0 * margin);
  return state;
}

}  // namespace grouptrack

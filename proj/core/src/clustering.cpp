#include "grouptrack/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "grouptrack/error.hpp"

namespace grouptrack {

void GroupingConfig::validate() const {
  if (!(window > 0.0)) {
    throw ConfigError("group window must be positive");
  }
  if (min_group == 0 || min_group > max_group) {
    throw ConfigError("group size bounds must satisfy 0 < min_group <= max_group");
  }
  if (!(max_bbox_side >= window)) {
    throw ConfigError("max_bbox_side must be at least the group window");
  }
}

FeatureGroup make_group(int id, std::size_t root, std::vector<int> members, const std::vector<Feature>& features) {
  FeatureGroup g;
  g.id = id;
  g.root = root;
  std::sort(members.begin(), members.end());
  g.members = std::move(members);
  if (g.members.empty()) {
    return g;
  }
  const Point2 first = features[g.members.front()].position;
  g.bbox = {first, first};
  Point2 sum;
  for (int m : g.members) {
    const Point2 p = features[m].position;
    sum = sum + p;
    g.bbox = g.bbox.expanded(p);
  }
  g.centroid = sum * (1.0 / static_cast<double>(g.members.size()));
  return g;
}

std::optional<std::size_t> Grouping::group_of(std::size_t feature_id) const {
  if (feature_id >= membership.size()) {
    throw InvalidInput("feature id out of range");
  }
  if (membership[feature_id] < 0) {
    return std::nullopt;
  }
  return sets.find_root(feature_id);
}

std::vector<std::size_t> seed_order(std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = count; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

namespace {

// Uniform grid over the feature extent with cell side = window, stored as a
// (cell key, id) array sorted so each cell is a contiguous id-ascending run.
class CellIndex {
 public:
  CellIndex(const std::vector<Feature>& features, double cell) : features_(features), cell_(cell) {
    origin_ = features.front().position;
    for (const Feature& f : features) {
      origin_.x = std::min(origin_.x, f.position.x);
      origin_.y = std::min(origin_.y, f.position.y);
    }
    entries_.reserve(features.size());
    for (const Feature& f : features) {
      const auto [cx, cy] = cell_of(f.position);
      entries_.push_back({key(cx, cy), f.id});
    }
    std::sort(entries_.begin(), entries_.end());
  }

  // Appends ids of features within Chebyshev `radius` of p that pass `keep`.
  template <typename Pred>
  void query(Point2 p, double radius, Pred keep, std::vector<int>& out) const {
    const auto [cx, cy] = cell_of(p);
    for (std::int64_t y = cy - 1; y <= cy + 1; ++y) {
      if (y < 0) continue;
      for (std::int64_t x = cx - 1; x <= cx + 1; ++x) {
        if (x < 0) continue;
        const std::uint64_t k = key(x, y);
        auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{k, std::numeric_limits<int>::min()});
        for (; it != entries_.end() && it->key == k; ++it) {
          if (keep(it->id) && chebyshev(features_[it->id].position, p) <= radius) {
            out.push_back(it->id);
          }
        }
      }
    }
  }

 private:
  struct Entry {
    std::uint64_t key;
    int id;
    friend auto operator<=>(const Entry&, const Entry&) = default;
  };

  std::pair<std::int64_t, std::int64_t> cell_of(Point2 p) const {
    return {static_cast<std::int64_t>(std::floor((p.x - origin_.x) / cell_)),
            static_cast<std::int64_t>(std::floor((p.y - origin_.y) / cell_))};
  }
  static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cy) << 32) | static_cast<std::uint64_t>(cx & 0xffffffff);
  }

  const std::vector<Feature>& features_;
  double cell_;
  Point2 origin_;
  std::vector<Entry> entries_;
};

}  // namespace

Grouping group_features(const FrameFeatures& frame, const GroupingConfig& config) {
  config.validate();
  const auto& features = frame.features;
  const std::size_t count = features.size();

  Grouping result;
  result.sets = UnionFind(count);
  result.membership.assign(count, -1);
  if (count == 0) {
    return result;
  }

  const double radius = config.window / 2.0;
  const CellIndex index(features, config.window);
  std::vector<char> assigned(count, 0);
  std::deque<int> queue;
  std::vector<int> members;
  std::vector<int> neighbors;
  auto unassigned = [&](int id) { return !assigned[id]; };

  for (const std::size_t seed : seed_order(count, config.seed)) {
    if (assigned[seed]) {
      continue;
    }
    const int seed_id = static_cast<int>(seed);
    assigned[seed] = 1;
    members.assign(1, seed_id);
    BoundingBox bbox{features[seed].position, features[seed].position};
    queue.assign(1, seed_id);

    while (!queue.empty()) {
      const int current = queue.front();
      queue.pop_front();
      if (members.size() >= config.max_group) {
        break;
      }
      neighbors.clear();
      index.query(features[current].position, radius, unassigned, neighbors);
      std::sort(neighbors.begin(), neighbors.end());
      for (const int n : neighbors) {
        if (members.size() >= config.max_group) {
          break;
        }
        const BoundingBox grown = bbox.expanded(features[n].position);
        if (grown.width() > config.max_bbox_side || grown.height() > config.max_bbox_side) {
          continue;
        }
        bbox = grown;
        assigned[n] = 1;
        result.sets.unite(seed, static_cast<std::size_t>(n));
        members.push_back(n);
        queue.push_back(n);
      }
    }

    if (members.size() >= config.min_group) {
      const int gid = static_cast<int>(result.groups.size());
      for (const int m : members) {
        result.membership[m] = gid;
      }
      result.groups.push_back(make_group(gid, result.sets.find(seed), members, features));
    }
  }
  result.sets.flatten();
  return result;
}

}  // namespace grouptrack

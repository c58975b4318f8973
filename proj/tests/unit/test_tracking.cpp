#include <gtest/gtest.h>

#include <random>

#include "grouptrack/error.hpp"
#include "grouptrack/tracking.hpp"
#include "oracles.hpp"

using namespace grouptrack;

namespace {

FeatureGroup box_group(int id, Point2 min, Point2 max) {
  FeatureGroup g;
  g.id = id;
  g.bbox = {min, max};
  g.centroid = (min + max) * 0.5;
  g.members = {0, 1, 2, 3, 4};
  return g;
}

GroupMatch accepted(int prev, int curr, std::size_t score) {
  GroupMatch m;
  m.group_prev = prev;
  m.group_curr = curr;
  m.score = score;
  m.accepted = true;
  return m;
}

}  // namespace

TEST(PredictSearchRegion, Examples) {
  const FeatureGroup g = box_group(0, {100, 100}, {130, 130});
  const auto r = predict_search_region(g, MotionProxy{{0, 0}, 3}, 30);
  EXPECT_EQ(r.center, (Point2{115, 115}));
  EXPECT_EQ(r.half_extent, (Point2{45, 45}));
  const auto shifted = predict_search_region(g, MotionProxy{{12, -3}, 1}, 30);
  EXPECT_EQ(shifted.center, (Point2{127, 112}));
  EXPECT_EQ(predict_search_region(g, std::nullopt, 30).center, g.centroid);
  EXPECT_THROW(predict_search_region(g, std::nullopt, 0), InvalidInput);
}

TEST(Bootstrap, DoubledMargin) {
  EXPECT_TRUE(bootstrap({}, {}).empty());
  const auto state = bootstrap({}, {box_group(0, {0, 0}, {30, 30})});
  ASSERT_EQ(state.regions.size(), 1u);
  EXPECT_EQ(state.regions[0].half_extent, (Point2{75, 75}));
  EXPECT_FALSE(state.proxies[0].has_value());
  std::vector<FeatureGroup> many;
  for (int i = 0; i < 7; ++i) many.push_back(box_group(i, {10.0 * i, 0}, {10.0 * i + 5, 5}));
  EXPECT_EQ(bootstrap({}, many).regions.size(), 7u);
}

TEST(IntersectCandidates, Examples) {
  const auto state = bootstrap({}, {box_group(0, {100, 100}, {130, 130})}, 30);
  const SearchRegion& r = state.regions[0];
  const std::vector<FeatureGroup> exact{
      box_group(0, r.center - r.half_extent, r.center + r.half_extent)};
  EXPECT_EQ(intersect_candidates(exact, state), (std::vector<CandidatePair>{{0, 0}}));
  const std::vector<FeatureGroup> outside{box_group(0, {400, 400}, {420, 420})};
  EXPECT_TRUE(intersect_candidates(outside, state).empty());
  // Touching edges count as overlap (closed intervals).
  const std::vector<FeatureGroup> touching{box_group(0, {r.center.x + r.half_extent.x, 100}, {300, 120})};
  EXPECT_EQ(intersect_candidates(touching, state).size(), 1u);
}

TEST(IntersectCandidates, MatchesOverlapOracle) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(0, 640), size(1, 90), disp(-20, 20);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<FeatureGroup> prev, curr;
    for (int i = 0; i < 50; ++i) {
      const Point2 p{pos(rng), pos(rng)};
      prev.push_back(box_group(i, p, p + Point2{size(rng), size(rng)}));
      const Point2 q{pos(rng), pos(rng)};
      curr.push_back(box_group(i, q, q + Point2{size(rng), size(rng)}));
    }
    TrackState state = bootstrap({}, prev, 30);
    for (int i = 0; i < 50; i += 3) {
      state.proxies[i] = MotionProxy{{disp(rng), disp(rng)}, 1};
      state.regions[i] = predict_search_region(prev[i], state.proxies[i], 30);
    }
    std::vector<std::pair<int, SearchRegion>> regions;
    std::vector<std::pair<int, BoundingBox>> boxes;
    for (int i = 0; i < 50; ++i) regions.emplace_back(i, state.regions[i]);
    for (int i = 0; i < 50; ++i) boxes.emplace_back(i, curr[i].bbox);
    const auto got = intersect_candidates(curr, state);
    EXPECT_EQ(got, oracle::overlaps(regions, boxes));
    EXPECT_LE(got.size(), prev.size() * curr.size());
  }
}

TEST(Advance, NoMatchesMeansRebirth) {
  const auto state = bootstrap({}, {box_group(0, {0, 0}, {10, 10})});
  const auto next = advance(state, {}, {box_group(0, {5, 5}, {15, 15}), box_group(1, {50, 50}, {60, 60})}, {});
  EXPECT_EQ(next.frame_index, state.frame_index + 1);
  ASSERT_EQ(next.proxies.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_FALSE(next.proxies[i].has_value());
    EXPECT_EQ(next.age(i), 0);
  }
}

TEST(Advance, DisplacementFromMatchedCentroids) {
  const auto state = bootstrap({}, {box_group(0, {90, 90}, {110, 110})});
  const std::vector<GroupMatch> acc{accepted(0, 0, 9)};
  const auto next = advance(state, {}, {box_group(0, {100, 88}, {120, 108})}, acc);
  ASSERT_TRUE(next.proxies[0].has_value());
  EXPECT_EQ(next.proxies[0]->displacement, (Point2{10, -2}));
  EXPECT_EQ(next.age(0), 1);
  EXPECT_EQ(next.regions[0].center, (Point2{120, 96}));
}

TEST(Advance, BestScoringPartnerWins) {
  const auto state = bootstrap({}, {box_group(0, {0, 0}, {10, 10}), box_group(1, {20, 0}, {30, 10})});
  const std::vector<GroupMatch> acc{accepted(0, 0, 8), accepted(1, 0, 12)};
  const auto next = advance(state, {}, {box_group(0, {22, 2}, {32, 12})}, acc);
  EXPECT_EQ(next.proxies[0]->displacement, (Point2{2, 2}));
}

TEST(Advance, UnknownGroupIsInvalidInput) {
  const auto state = bootstrap({}, {box_group(0, {0, 0}, {10, 10})});
  const std::vector<GroupMatch> acc{accepted(3, 0, 8)};
  EXPECT_THROW(advance(state, {}, {box_group(0, {0, 0}, {10, 10})}, acc), InvalidInput);
}

TEST(Advance, AgeGrowsWhileMatchedAndIsDeterministic) {
  TrackState state = bootstrap({}, {box_group(0, {0, 0}, {10, 10})});
  for (int step = 1; step <= 5; ++step) {
    const std::vector<GroupMatch> acc{accepted(0, 0, 9)};
    const std::vector<FeatureGroup> curr{box_group(0, {2.0 * step, 0}, {2.0 * step + 10, 10})};
    const auto a = advance(state, {}, curr, acc);
    const auto b = advance(state, {}, curr, acc);
    EXPECT_EQ(a.proxies, b.proxies);
    EXPECT_EQ(a.regions, b.regions);
    EXPECT_EQ(a.age(0), step);
    state = a;
  }
}

TEST(Widen, RecomputesWithDoubledMargin) {
  TrackState state = bootstrap({}, {box_group(0, {0, 0}, {30, 30})}, 30);
  state = advance(state, {}, {box_group(0, {10, 0}, {40, 30})}, std::vector<GroupMatch>{accepted(0, 0, 9)}, 30);
  EXPECT_EQ(state.regions[0].half_extent, (Point2{45, 45}));
  const auto wide = widen(state, 30);
  EXPECT_EQ(wide.regions[0].half_extent, (Point2{75, 75}));
  EXPECT_EQ(wide.regions[0].center, (Point2{35, 15}));
  EXPECT_EQ(wide.proxies, state.proxies);
}

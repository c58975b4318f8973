#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "grouptrack/clustering.hpp"
#include "grouptrack/features.hpp"

namespace grouptrack {

enum class Metric { hamming, euclidean };

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric metric);

/// Throws InvalidInput when the metric does not fit the descriptor kind.
double descriptor_distance(const Descriptor& a, const Descriptor& b, Metric metric);

struct MatchCandidate {
  int feature_prev = 0;
  int feature_curr = 0;
  double distance = 0.0;

  friend bool operator==(const MatchCandidate&, const MatchCandidate&) = default;
};

/// Mutual nearest neighbours: (a, b) is emitted iff b is a's unique nearest
/// neighbour among `curr` and a is b's unique nearest neighbour among `prev`.
/// A feature whose minimum distance is attained twice has no neighbour.
/// Output is ordered by position in `prev`.
std::vector<MatchCandidate> mutual_nn_match(std::span<const Feature> prev, std::span<const Feature> curr,
                                            Metric metric);

/// Same as above over subsets of two frames selected by feature id.
std::vector<MatchCandidate> mutual_nn_match(const std::vector<Feature>& prev_frame, std::span<const int> prev_ids,
                                            const std::vector<Feature>& curr_frame, std::span<const int> curr_ids,
                                            Metric metric);

struct GroupMatch {
  int group_prev = 0;
  int group_curr = 0;
  std::vector<MatchCandidate> supports;
  std::size_t score = 0;
  double tau = 0.0;
  bool accepted = false;
};

/// Mutual-NN supports between two groups, accepted when score > k * sqrt(min(n_prev, n_curr)).
GroupMatch score_group_pair(const FeatureGroup& prev, const std::vector<Feature>& prev_features,
                            const FeatureGroup& curr, const std::vector<Feature>& curr_features, double k,
                            Metric metric);

struct CandidatePair {
  int group_prev = 0;
  int group_curr = 0;

  friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
  friend auto operator<=>(const CandidatePair&, const CandidatePair&) = default;
};

struct InlierMatch {
  int feature_prev = 0;
  int feature_curr = 0;
  double distance = 0.0;
  int group_prev = 0;
  int group_curr = 0;

  friend bool operator==(const InlierMatch&, const InlierMatch&) = default;
};

struct FrameMatchResult {
  std::vector<GroupMatch> accepted;
  std::vector<InlierMatch> inliers;
};

/// Scores every candidate pair (order preserved, rejected pairs included).
std::vector<GroupMatch> score_candidates(std::span<const FeatureGroup> groups_prev,
                                         const std::vector<Feature>& features_prev,
                                         std::span<const FeatureGroup> groups_curr,
                                         const std::vector<Feature>& features_curr,
                                         std::span<const CandidatePair> candidates, double k, Metric metric);

/// Keeps accepted pairs and emits one match per feature: features claimed by
/// several accepted pairs keep the match from the highest-scoring pair, ties
/// going to the lower group_curr id (then lower group_prev id). Inliers are
/// returned sorted by (feature_prev, feature_curr).
FrameMatchResult select_inliers(std::vector<GroupMatch> scored);

/// score_candidates followed by select_inliers.
FrameMatchResult match_frame_pair(std::span<const FeatureGroup> groups_prev, const std::vector<Feature>& features_prev,
                                  std::span<const FeatureGroup> groups_curr, const std::vector<Feature>& features_curr,
                                  std::span<const CandidatePair> candidates, double k, Metric metric);

}  // namespace grouptrack

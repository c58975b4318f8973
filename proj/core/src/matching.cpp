#include "grouptrack/matching.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

#include "grouptrack/error.hpp"
#include "grouptrack/probability.hpp"

namespace grouptrack {

Metric parse_metric(std::string_view name) {
  if (name == "hamming") return Metric::hamming;
  if (name == "euclidean") return Metric::euclidean;
  throw ConfigError("unknown metric '" + std::string(name) + "' (expected hamming or euclidean)");
}

std::string_view to_string(Metric metric) { return metric == Metric::hamming ? "hamming" : "euclidean"; }

double descriptor_distance(const Descriptor& a, const Descriptor& b, Metric metric) {
  return metric == Metric::hamming ? static_cast<double>(hamming_distance(a, b)) : euclidean_distance(a, b);
}

namespace {

void check_descriptors(std::span<const Feature* const> prev, std::span<const Feature* const> curr, Metric metric) {
  if (prev.empty() || curr.empty()) {
    throw InvalidInput("mutual nearest-neighbour matching needs two non-empty feature sets");
  }
  const DescriptorKind expected = metric == Metric::hamming ? DescriptorKind::binary : DescriptorKind::real;
  const std::size_t length = prev.front()->descriptor.size();
  auto check = [&](const Feature* f) {
    if (f->descriptor.kind() != expected) {
      throw InvalidInput(std::string("metric ") + std::string(to_string(metric)) +
                         " does not apply to this descriptor kind");
    }
    if (f->descriptor.size() != length) {
      throw InvalidInput("descriptor length mismatch");
    }
  };
  std::for_each(prev.begin(), prev.end(), check);
  std::for_each(curr.begin(), curr.end(), check);
}

// Index of the unique minimum of each row / column of a rows x cols matrix,
// or -1 when the minimum is attained more than once.
template <typename T>
void unique_minima(const std::vector<T>& dist, std::size_t rows, std::size_t cols, std::vector<int>& row_best,
                   std::vector<int>& col_best) {
  row_best.assign(rows, -1);
  col_best.assign(cols, -1);
  thread_local std::vector<T> col_min;
  thread_local std::vector<int> col_count;
  col_min.assign(cols, std::numeric_limits<T>::max());
  col_count.assign(cols, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = dist.data() + r * cols;
    T best = std::numeric_limits<T>::max();
    int count = 0;
    int arg = -1;
    for (std::size_t c = 0; c < cols; ++c) {
      const T d = row[c];
      if (d < best) {
        best = d;
        count = 1;
        arg = static_cast<int>(c);
      } else if (d == best) {
        ++count;
      }
      if (d < col_min[c]) {
        col_min[c] = d;
        col_count[c] = 1;
        col_best[c] = static_cast<int>(r);
      } else if (d == col_min[c]) {
        ++col_count[c];
      }
    }
    row_best[r] = count == 1 ? arg : -1;
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (col_count[c] != 1) col_best[c] = -1;
  }
}

std::vector<MatchCandidate> mutual_core(std::span<const Feature* const> prev, std::span<const Feature* const> curr,
                                        Metric metric) {
  check_descriptors(prev, curr, metric);
  const std::size_t rows = prev.size();
  const std::size_t cols = curr.size();
  thread_local std::vector<int> row_best;
  thread_local std::vector<int> col_best;
  std::vector<MatchCandidate> out;

  if (metric == Metric::hamming) {
    const std::size_t words = prev.front()->descriptor.words().size();
    thread_local std::vector<std::uint64_t> packed;
    thread_local std::vector<int> dist;
    packed.resize(cols * words);
    for (std::size_t c = 0; c < cols; ++c) {
      std::copy_n(curr[c]->descriptor.words().data(), words, packed.data() + c * words);
    }
    dist.resize(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::uint64_t* a = prev[r]->descriptor.words().data();
      int* row = dist.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) {
        const std::uint64_t* b = packed.data() + c * words;
        int d = 0;
        for (std::size_t w = 0; w < words; ++w) {
          d += std::popcount(a[w] ^ b[w]);
        }
        row[c] = d;
      }
    }
    unique_minima(dist, rows, cols, row_best, col_best);
    for (std::size_t r = 0; r < rows; ++r) {
      const int c = row_best[r];
      if (c >= 0 && col_best[c] == static_cast<int>(r)) {
        out.push_back({prev[r]->id, curr[c]->id, static_cast<double>(dist[r * cols + c])});
      }
    }
  } else {
    std::vector<double> dist(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        dist[r * cols + c] = euclidean_distance(prev[r]->descriptor, curr[c]->descriptor);
      }
    }
    unique_minima(dist, rows, cols, row_best, col_best);
    for (std::size_t r = 0; r < rows; ++r) {
      const int c = row_best[r];
      if (c >= 0 && col_best[c] == static_cast<int>(r)) {
        out.push_back({prev[r]->id, curr[c]->id, dist[r * cols + c]});
      }
    }
  }
  return out;
}

std::vector<const Feature*> gather(const std::vector<Feature>& frame, std::span<const int> ids) {
  std::vector<const Feature*> out;
  out.reserve(ids.size());
  for (const int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= frame.size()) {
      throw InvalidInput("feature id " + std::to_string(id) + " out of range");
    }
    out.push_back(&frame[id]);
  }
  return out;
}

}  // namespace

std::vector<MatchCandidate> mutual_nn_match(std::span<const Feature> prev, std::span<const Feature> curr,
                                            Metric metric) {
  std::vector<const Feature*> a;
  std::vector<const Feature*> b;
  a.reserve(prev.size());
  b.reserve(curr.size());
  for (const Feature& f : prev) a.push_back(&f);
  for (const Feature& f : curr) b.push_back(&f);
  return mutual_core(a, b, metric);
}

std::vector<MatchCandidate> mutual_nn_match(const std::vector<Feature>& prev_frame, std::span<const int> prev_ids,
                                            const std::vector<Feature>& curr_frame, std::span<const int> curr_ids,
                                            Metric metric) {
  return mutual_core(gather(prev_frame, prev_ids), gather(curr_frame, curr_ids), metric);
}

GroupMatch score_group_pair(const FeatureGroup& prev, const std::vector<Feature>& prev_features,
                            const FeatureGroup& curr, const std::vector<Feature>& curr_features, double k,
                            Metric metric) {
  GroupMatch match;
  match.group_prev = prev.id;
  match.group_curr = curr.id;
  match.supports = mutual_nn_match(prev_features, prev.members, curr_features, curr.members, metric);
  match.score = match.supports.size();
  const std::size_t n_eff = std::min(prev.size(), curr.size());
  match.tau = support_threshold(static_cast<double>(n_eff), k);
  match.accepted = static_cast<double>(match.score) > match.tau;
  return match;
}

std::vector<GroupMatch> score_candidates(std::span<const FeatureGroup> groups_prev,
                                         const std::vector<Feature>& features_prev,
                                         std::span<const FeatureGroup> groups_curr,
                                         const std::vector<Feature>& features_curr,
                                         std::span<const CandidatePair> candidates, double k, Metric metric) {
  std::vector<GroupMatch> scored;
  scored.reserve(candidates.size());
  for (const CandidatePair& pair : candidates) {
    if (pair.group_prev < 0 || static_cast<std::size_t>(pair.group_prev) >= groups_prev.size() ||
        pair.group_curr < 0 || static_cast<std::size_t>(pair.group_curr) >= groups_curr.size()) {
      throw InvalidInput("candidate pair references an unknown group");
    }
    scored.push_back(score_group_pair(groups_prev[pair.group_prev], features_prev, groups_curr[pair.group_curr],
                                      features_curr, k, metric));
  }
  return scored;
}

FrameMatchResult select_inliers(std::vector<GroupMatch> scored) {
  FrameMatchResult result;
  for (GroupMatch& m : scored) {
    if (m.accepted) result.accepted.push_back(std::move(m));
  }

  std::vector<std::size_t> order(result.accepted.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const GroupMatch& x = result.accepted[a];
    const GroupMatch& y = result.accepted[b];
    if (x.score != y.score) return x.score > y.score;
    if (x.group_curr != y.group_curr) return x.group_curr < y.group_curr;
    return x.group_prev < y.group_prev;
  });

  int max_prev = -1;
  int max_curr = -1;
  for (const GroupMatch& m : result.accepted) {
    for (const MatchCandidate& s : m.supports) {
      max_prev = std::max(max_prev, s.feature_prev);
      max_curr = std::max(max_curr, s.feature_curr);
    }
  }
  std::vector<char> used_prev(static_cast<std::size_t>(max_prev + 1), 0);
  std::vector<char> used_curr(static_cast<std::size_t>(max_curr + 1), 0);
  for (const std::size_t i : order) {
    const GroupMatch& m = result.accepted[i];
    for (const MatchCandidate& s : m.supports) {
      if (used_prev[s.feature_prev] || used_curr[s.feature_curr]) {
        continue;
      }
      used_prev[s.feature_prev] = 1;
      used_curr[s.feature_curr] = 1;
      result.inliers.push_back({s.feature_prev, s.feature_curr, s.distance, m.group_prev, m.group_curr});
    }
  }
  std::sort(result.inliers.begin(), result.inliers.end(), [](const InlierMatch& a, const InlierMatch& b) {
    return a.feature_prev != b.feature_prev ? a.feature_prev < b.feature_prev : a.feature_curr < b.feature_curr;
  });
  return result;
}

FrameMatchResult match_frame_pair(std::span<const FeatureGroup> groups_prev, const std::vector<Feature>& features_prev,
                                  std::span<const FeatureGroup> groups_curr, const std::vector<Feature>& features_curr,
                                  std::span<const CandidatePair> candidates, double k, Metric metric) {
  return select_inliers(
      score_candidates(groups_prev, features_prev, groups_curr, features_curr, candidates, k, metric));
}

}  // namespace grouptrack

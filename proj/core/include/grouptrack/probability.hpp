#pragma once

namespace grouptrack {

/// Parameters of the support-match model between a patch A (n features, whose
/// nearest neighbours are sought among n_candidates features on B's side) and a
/// patch B (m features against m_candidates on A's side).
struct MatchProbabilityParams {
  double t = 0.5;  // prior that a single feature matches correctly
  double n = 1.0;
  double n_candidates = 1.0;
  double m = 1.0;
  double m_candidates = 1.0;
  double k = 2.0;

  /// Throws InvalidInput unless 0 <= t <= 1, 1 <= n <= N, 1 <= m <= M and k > 0.
  void validate() const;
};

/// Probability that a feature of a correlated patch has its nearest neighbour
/// in the partner patch: t + (1 - t) n / N.
double p_true(double t, double n, double n_candidates);

/// Same for an uncorrelated patch: (1 - t) n / N.
double p_false(double t, double n, double n_candidates);

/// Cross-checked true-match probability (t + (1-t) n/N)(t + (1-t) m/M).
/// With n/N == m/M this is t^2 + 2t(1-t) n/N + (1-t)^2 (n/N)(m/M).
double p_true_cc(const MatchProbabilityParams& params);

/// Cross-checked false-match probability: (1-t)^2 (n/N)(m/M).
double p_false_cc(const MatchProbabilityParams& params);

/// p_true_cc - p_false_cc.
double separation_gap(const MatchProbabilityParams& params);

struct BinomialMoments {
  double mean = 0.0;
  double stddev = 0.0;
};

BinomialMoments binomial_moments(double trials, double p);

enum class ThresholdMode { approximate, exact };

/// Support threshold for a group of n features.
///
/// approximate: k * sqrt(n), the deployed criterion.
/// exact: mean + k * stddev of Binomial(n, p_false_cc).
///
/// The model treats single-feature matches as independent even though mutual
/// nearest-neighbour matching couples them.
double support_threshold(double n, double k, ThresholdMode mode = ThresholdMode::approximate, double p_false_cc = 0.0);

}  // namespace grouptrack

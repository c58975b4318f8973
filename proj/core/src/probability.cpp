#include "grouptrack/probability.hpp"

#include <cmath>

#include "grouptrack/error.hpp"

namespace grouptrack {

namespace {

void check_prior(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw InvalidInput("match prior t must lie in [0, 1]");
  }
}

double ratio(double count, double candidates) {
  if (!(count >= 1.0) || !(candidates >= count)) {
    throw InvalidInput("feature counts must satisfy 1 <= n <= N");
  }
  return count / candidates;
}

}  // namespace

void MatchProbabilityParams::validate() const {
  check_prior(t);
  ratio(n, n_candidates);
  ratio(m, m_candidates);
  if (!(k > 0.0)) {
    throw InvalidInput("threshold multiplier k must be positive");
  }
}

double p_true(double t, double n, double n_candidates) {
  check_prior(t);
  return t + (1.0 - t) * ratio(n, n_candidates);
}

double p_false(double t, double n, double n_candidates) {
  check_prior(t);
  return (1.0 - t) * ratio(n, n_candidates);
}

double p_true_cc(const MatchProbabilityParams& params) {
  params.validate();
  const double t = params.t;
  const double a = params.n / params.n_candidates;
  const double b = params.m / params.m_candidates;
  // (t + (1-t)a)(t + (1-t)b); equals t^2 + 2t(1-t)a + (1-t)^2 ab when a == b.
  return t * t + t * (1.0 - t) * (a + b) + (1.0 - t) * (1.0 - t) * a * b;
}

double p_false_cc(const MatchProbabilityParams& params) {
  params.validate();
  const double t = params.t;
  return (1.0 - t) * (1.0 - t) * (params.n / params.n_candidates) * (params.m / params.m_candidates);
}

double separation_gap(const MatchProbabilityParams& params) { return p_true_cc(params) - p_false_cc(params); }

BinomialMoments binomial_moments(double trials, double p) {
  if (!(trials >= 1.0)) {
    throw InvalidInput("binomial trial count must be >= 1");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidInput("binomial probability must lie in [0, 1]");
  }
  return {trials * p, std::sqrt(trials * p * (1.0 - p))};
}

double support_threshold(double n, double k, ThresholdMode mode, double p_false_cc) {
  if (!(n >= 1.0)) {
    throw InvalidInput("group size must be >= 1");
  }
  if (!(k > 0.0)) {
    throw InvalidInput("threshold multiplier k must be positive");
  }
  if (mode == ThresholdMode::approximate) {
    return k * std::sqrt(n);
  }
  const BinomialMoments moments = binomial_moments(n, p_false_cc);
  return moments.mean + k * moments.stddev;
}

}  // namespace grouptrack

#include "grouptrack/geometry.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "grouptrack/error.hpp"

namespace grouptrack {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kRankTolerance = 1e-10;

}  // namespace

void CameraIntrinsics::validate(int width, int height) const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw InvalidInput("focal lengths must be positive");
  }
  if (width > 0 && height > 0 && !(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw InvalidInput("principal point must lie inside the image");
  }
}

Mat3 CameraIntrinsics::matrix() const {
  Mat3 k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Vec3 CameraIntrinsics::normalize(Point2 pixel) const { return {(pixel.x - cx) / fx, (pixel.y - cy) / fy, 1.0}; }

Point2 CameraIntrinsics::project(const Vec3& point) const {
  return {fx * point.x() / point.z() + cx, fy * point.y() / point.z() + cy};
}

Pose relative_pose(const Pose& a, const Pose& b) {
  Pose rel;
  rel.rotation = b.rotation * a.rotation.transpose();
  rel.translation = b.translation - rel.rotation * a.translation;
  return rel;
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

namespace {

// Similarity moving the centroid to the origin with mean distance sqrt(2).
Mat3 conditioning(std::span<const Vec3> pts) {
  double mx = 0.0;
  double my = 0.0;
  for (const Vec3& p : pts) {
    mx += p.x();
    my += p.y();
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const Vec3& p : pts) {
    mean_dist += std::hypot(p.x() - mx, p.y() - my);
  }
  mean_dist /= static_cast<double>(pts.size());
  const double s = mean_dist > 0.0 ? std::numbers::sqrt2 / mean_dist : 1.0;
  Mat3 t;
  t << s, 0.0, -s * mx, 0.0, s, -s * my, 0.0, 0.0, 1.0;
  return t;
}

Mat3 project_to_essential(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * Eigen::Vector3d(1.0, 1.0, 0.0).asDiagonal() * svd.matrixV().transpose();
}

}  // namespace

std::optional<Mat3> solve_essential(std::span<const Vec3> prev, std::span<const Vec3> curr) {
  if (prev.size() != curr.size()) {
    throw InvalidInput("correspondence sets differ in size");
  }
  if (prev.size() < 8) {
    throw InsufficientData("the 8-point solver needs at least 8 correspondences");
  }
  const Mat3 ta = conditioning(prev);
  const Mat3 tb = conditioning(curr);
  const auto n = static_cast<Eigen::Index>(prev.size());
  Eigen::Matrix<double, Eigen::Dynamic, 9> a(n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 p = ta * prev[i];
    const Vec3 c = tb * curr[i];
    a.row(i) << c.x() * p.x(), c.x() * p.y(), c.x(), c.y() * p.x(), c.y() * p.y(), c.y(), p.x(), p.y(), 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() < 8 || sv(7) <= kRankTolerance * sv(0)) {
    return std::nullopt;
  }
  const Eigen::Matrix<double, 9, 1> e = svd.matrixV().col(8);
  Mat3 e_hat;
  e_hat << e(0), e(1), e(2), e(3), e(4), e(5), e(6), e(7), e(8);
  return project_to_essential(tb.transpose() * e_hat * ta);
}

double sampson_distance(const Mat3& f, Point2 prev, Point2 curr) {
  const Vec3 x1(prev.x, prev.y, 1.0);
  const Vec3 x2(curr.x, curr.y, 1.0);
  const Vec3 fx1 = f * x1;
  const Vec3 ftx2 = f.transpose() * x2;
  const double num = x2.dot(fx1);
  const double den = fx1.x() * fx1.x() + fx1.y() * fx1.y() + ftx2.x() * ftx2.x() + ftx2.y() * ftx2.y();
  if (den <= 0.0) {
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::abs(num) / std::sqrt(den);
}

Mat3 fundamental_from_essential(const Mat3& essential, const CameraIntrinsics& intrinsics) {
  const Mat3 k_inv = intrinsics.matrix().inverse();
  return k_inv.transpose() * essential * k_inv;
}

std::array<RigidMotion, 4> decompose_essential(const Mat3& essential) {
  Eigen::JacobiSVD<Mat3> svd(essential, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  Mat3 v = svd.matrixV();
  if (u.determinant() < 0.0) u = -u;
  if (v.determinant() < 0.0) v = -v;
  Mat3 w;
  w << 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0;
  const Mat3 r1 = u * w * v.transpose();
  const Mat3 r2 = u * w.transpose() * v.transpose();
  const Vec3 t = u.col(2);
  return {RigidMotion{r1, t}, RigidMotion{r1, -t}, RigidMotion{r2, t}, RigidMotion{r2, -t}};
}

std::size_t count_in_front(const RigidMotion& motion, std::span<const Vec3> prev, std::span<const Vec3> curr) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    // Depths (d1, d2) with d2 * curr = R * (d1 * prev) + t, least squares.
    Eigen::Matrix<double, 3, 2> a;
    a.col(0) = motion.rotation * prev[i];
    a.col(1) = -curr[i];
    const Eigen::Vector2d d = (a.transpose() * a).ldlt().solve(-a.transpose() * motion.translation);
    if (d(0) > 0.0 && d(1) > 0.0) {
      ++count;
    }
  }
  return count;
}

namespace {

struct Hypothesis {
  std::size_t inliers = 0;
  Mat3 model = Mat3::Zero();
  bool valid = false;
};

// Draws `k` distinct indices into the front of `pool` (partial Fisher-Yates).
void draw_sample(std::vector<std::size_t>& pool, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = pool.size();
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(pool[i], pool[j]);
  }
}

std::size_t score_essential(const Mat3& e, std::span<const Correspondence> matches, const CameraIntrinsics& k,
                            double threshold, std::vector<char>* mask) {
  const Mat3 f = fundamental_from_essential(e, k);
  std::size_t count = 0;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const bool in = sampson_distance(f, matches[i].prev, matches[i].curr) <= threshold;
    count += in;
    if (mask) (*mask)[i] = in;
  }
  return count;
}

std::size_t score_rotation(const Mat3& r, std::span<const Correspondence> matches, std::span<const Vec3> prev,
                           const CameraIntrinsics& k, double threshold, std::vector<char>* mask) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const Vec3 x = r * prev[i];
    bool in = false;
    if (x.z() > 0.0) {
      const Point2 p = k.project(x);
      in = std::hypot(p.x - matches[i].curr.x, p.y - matches[i].curr.y) <= threshold;
    }
    count += in;
    if (mask) (*mask)[i] = in;
  }
  return count;
}

// Least-squares rotation taking prev bearings onto curr bearings.
std::optional<Mat3> fit_rotation(std::span<const Correspondence> matches, std::span<const Vec3> prev,
                                 std::span<const Vec3> curr, std::span<const std::size_t> idx) {
  bool zero_flow = true;
  Mat3 h = Mat3::Zero();
  for (const std::size_t i : idx) {
    zero_flow = zero_flow && matches[i].prev == matches[i].curr;
    h += prev[i].normalized() * curr[i].normalized().transpose();
  }
  if (zero_flow) {
    return Mat3::Identity();
  }
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(1) <= kRankTolerance * svd.singularValues()(0)) {
    return std::nullopt;
  }
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return v * d * u.transpose();
}

std::vector<std::size_t> mask_indices(const std::vector<char>& mask) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) idx.push_back(i);
  }
  return idx;
}

int adaptive_limit(double inlier_fraction, std::size_t sample_size, double confidence, int max_iterations) {
  const double good = std::pow(inlier_fraction, static_cast<double>(sample_size));
  if (good >= 1.0) return 1;
  if (good <= 0.0) return max_iterations;
  const double needed = std::log(1.0 - confidence) / std::log(1.0 - good);
  return static_cast<int>(std::min<double>(max_iterations, std::ceil(needed)));
}

}  // namespace

PoseEstimate estimate_essential_ransac(std::span<const Correspondence> matches, const CameraIntrinsics& intrinsics,
                                       const RansacConfig& config) {
  if (matches.size() < 8) {
    throw InsufficientData("pose estimation needs at least 8 correspondences, got " +
                           std::to_string(matches.size()));
  }
  intrinsics.validate();
  if (!(config.threshold > 0.0) || config.max_iterations < 1) {
    throw InvalidInput("RANSAC threshold and iteration count must be positive");
  }

  const std::size_t n = matches.size();
  std::vector<Vec3> prev(n);
  std::vector<Vec3> curr(n);
  for (std::size_t i = 0; i < n; ++i) {
    prev[i] = intrinsics.normalize(matches[i].prev);
    curr[i] = intrinsics.normalize(matches[i].curr);
  }

  PoseEstimate estimate;
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;

  // Essential matrix hypotheses.
  Hypothesis best_e;
  std::vector<Vec3> sp(8);
  std::vector<Vec3> sc(8);
  int limit = config.max_iterations;
  int iter = 0;
  for (; iter < limit; ++iter) {
    draw_sample(pool, 8, rng);
    for (std::size_t j = 0; j < 8; ++j) {
      sp[j] = prev[pool[j]];
      sc[j] = curr[pool[j]];
    }
    const auto e = solve_essential(sp, sc);
    if (!e) {
      ++estimate.degenerate_samples;
      continue;
    }
    const std::size_t count = score_essential(*e, matches, intrinsics, config.threshold, nullptr);
    if (count > best_e.inliers || !best_e.valid) {
      best_e = {count, *e, true};
      if (config.adaptive) {
        limit = std::max(iter + 1, adaptive_limit(static_cast<double>(count) / n, 8, config.confidence,
                                                  config.max_iterations));
      }
    }
  }
  estimate.iterations = iter;

  std::vector<char> mask(n, 0);
  if (best_e.valid) {
    // Refit on the inlier set until it stops growing.
    score_essential(best_e.model, matches, intrinsics, config.threshold, &mask);
    for (int round = 0; round < 5; ++round) {
      const auto idx = mask_indices(mask);
      if (idx.size() < 8) break;
      std::vector<Vec3> ip;
      std::vector<Vec3> ic;
      for (const std::size_t i : idx) {
        ip.push_back(prev[i]);
        ic.push_back(curr[i]);
      }
      const auto refit = solve_essential(ip, ic);
      if (!refit) break;
      std::vector<char> refit_mask(n, 0);
      const std::size_t count = score_essential(*refit, matches, intrinsics, config.threshold, &refit_mask);
      if (count < best_e.inliers) break;
      const bool grew = count > best_e.inliers;
      best_e.model = *refit;
      best_e.inliers = count;
      mask = std::move(refit_mask);
      if (!grew) break;
    }
  }

  // Pure rotation hypotheses from 2-correspondence samples.
  Hypothesis best_r;
  std::mt19937_64 rot_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const int rot_iterations = std::min(config.max_iterations, 500);
  for (int it = 0; it < rot_iterations; ++it) {
    draw_sample(pool, 2, rot_rng);
    const std::size_t sample[2] = {pool[0], pool[1]};
    const auto r = fit_rotation(matches, prev, curr, sample);
    if (!r) continue;
    const std::size_t count = score_rotation(*r, matches, prev, intrinsics, config.threshold, nullptr);
    if (count > best_r.inliers || !best_r.valid) {
      best_r = {count, *r, true};
    }
  }
  std::vector<char> rot_mask(n, 0);
  if (best_r.valid) {
    score_rotation(best_r.model, matches, prev, intrinsics, config.threshold, &rot_mask);
    const auto idx = mask_indices(rot_mask);
    if (idx.size() >= 2) {
      if (const auto refit = fit_rotation(matches, prev, curr, idx)) {
        std::vector<char> refit_mask(n, 0);
        const std::size_t count = score_rotation(*refit, matches, prev, intrinsics, config.threshold, &refit_mask);
        if (count >= best_r.inliers) {
          best_r = {count, *refit, true};
          rot_mask = std::move(refit_mask);
        }
      }
    }
  }

  if (best_r.valid && (!best_e.valid || best_r.inliers >= best_e.inliers)) {
    estimate.rotation = best_r.model;
    estimate.translation_dir = Vec3::UnitZ();
    estimate.translation_observable = false;
    estimate.inlier_count = best_r.inliers;
    estimate.inlier_mask = std::move(rot_mask);
    estimate.essential = Mat3::Zero();
  } else if (best_e.valid) {
    const auto idx = mask_indices(mask);
    std::vector<Vec3> ip;
    std::vector<Vec3> ic;
    for (const std::size_t i : idx) {
      ip.push_back(prev[i]);
      ic.push_back(curr[i]);
    }
    const auto candidates = decompose_essential(best_e.model);
    std::size_t best_front = 0;
    std::size_t best_idx = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const std::size_t front = count_in_front(candidates[c], ip, ic);
      if (front > best_front) {
        best_front = front;
        best_idx = c;
      }
    }
    estimate.rotation = candidates[best_idx].rotation;
    estimate.translation_dir = candidates[best_idx].translation.normalized();
    estimate.translation_observable = true;
    estimate.inlier_count = best_e.inliers;
    estimate.inlier_mask = std::move(mask);
    estimate.essential = best_e.model;
  } else {
    throw InsufficientData("every RANSAC sample was degenerate");
  }
  estimate.inlier_ratio = static_cast<double>(estimate.inlier_count) / static_cast<double>(n);
  return estimate;
}

double rotation_angle_deg(const Mat3& r) {
  const Vec3 axis(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double s = axis.norm() / 2.0;
  const double c = (r.trace() - 1.0) / 2.0;
  return std::atan2(s, c) * kRadToDeg;
}

double direction_angle_deg(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), std::abs(a.dot(b))) * kRadToDeg;
}

double pose_error(const PoseEstimate& estimate, const Mat3& gt_rotation, const Vec3& gt_translation) {
  const double rot = rotation_angle_deg(estimate.rotation * gt_rotation.transpose());
  if (gt_translation.norm() < 1e-12) {
    return rot;
  }
  const double trans =
      estimate.translation_observable ? direction_angle_deg(estimate.translation_dir, gt_translation) : 90.0;
  return std::max(rot, trans);
}

std::vector<SuccessPoint> pose_success_ratio(std::span<const double> errors, std::span<const double> thresholds) {
  if (errors.empty()) {
    throw InvalidInput("pose success ratio needs at least one error value");
  }
  std::vector<SuccessPoint> curve;
  curve.reserve(thresholds.size());
  for (const double t : thresholds) {
    const auto hits = std::count_if(errors.begin(), errors.end(), [t](double e) { return e <= t; });
    curve.push_back({t, static_cast<double>(hits) / static_cast<double>(errors.size())});
  }
  return curve;
}

Repeatability reprojection_repeatability(std::span<const Correspondence> matches, double features_per_frame) {
  if (matches.empty()) {
    throw UndefinedMetric("repeatability is undefined without matches");
  }
  if (!(features_per_frame > 0.0)) {
    throw InvalidInput("features per frame must be positive");
  }
  double sum = 0.0;
  for (const Correspondence& m : matches) {
    sum += std::hypot(m.curr.x - m.prev.x, m.curr.y - m.prev.y);
  }
  Repeatability r;
  r.mean_error = sum / static_cast<double>(matches.size());
  r.per_1000_features = r.mean_error * 1000.0 / features_per_frame;
  return r;
}

}  // namespace grouptrack

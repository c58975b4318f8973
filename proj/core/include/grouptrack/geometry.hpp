#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "grouptrack/types.hpp"

namespace grouptrack {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

struct CameraIntrinsics {
  double fx = 500.0;
  double fy = 500.0;
  double cx = 320.0;
  double cy = 240.0;

  /// Throws InvalidInput unless focal lengths are positive and, when an image
  /// size is given, the principal point lies inside it.
  void validate(int width = 0, int height = 0) const;

  Mat3 matrix() const;
  /// Pixel to normalized image plane (z = 1).
  Vec3 normalize(Point2 pixel) const;
  /// Camera-frame point to pixel; the point must have z > 0.
  Point2 project(const Vec3& point) const;
};

/// Rigid transform taking world (or first-camera) coordinates into a camera
/// frame: x_cam = rotation * x + translation.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
};

/// Motion from camera a to camera b, both given as world-to-camera poses.
Pose relative_pose(const Pose& a, const Pose& b);

struct Correspondence {
  Point2 prev;
  Point2 curr;
};

struct RansacConfig {
  double threshold = 1.0;  // Sampson distance in pixels
  int max_iterations = 2000;
  std::uint64_t seed = 42;
  bool adaptive = false;     // stop once `confidence` is reached
  double confidence = 0.999;
};

/// Relative pose of the current camera with respect to the previous one:
/// x_curr = rotation * x_prev + t, with t known up to scale.
struct PoseEstimate {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation_dir = Vec3::UnitZ();
  /// False when the data is explained by a pure rotation; translation_dir is then arbitrary.
  bool translation_observable = true;
  std::size_t inlier_count = 0;
  double inlier_ratio = 0.0;
  std::vector<char> inlier_mask;
  Mat3 essential = Mat3::Zero();
  std::size_t degenerate_samples = 0;
  int iterations = 0;
};

/// Essential matrix RANSAC with the normalized 8-point solver.
///
/// Each hypothesis is projected onto singular values (1, 1, 0) and scored by
/// Sampson distance in pixels. The winner (most inliers, earliest iteration on
/// ties) is refit on its inliers and decomposed; the (R, t) candidate that puts
/// most inliers in front of both cameras is returned. Rank-deficient samples
/// are skipped and counted. When a pure rotation explains at least as many
/// correspondences as the best essential matrix, the rotation is returned and
/// translation is flagged unobservable.
PoseEstimate estimate_essential_ransac(std::span<const Correspondence> matches, const CameraIntrinsics& intrinsics,
                                       const RansacConfig& config = {});

/// Normalized 8-point solution for >= 8 normalized correspondences (prev, curr),
/// projected to a valid essential matrix; nullopt if the system is rank deficient.
std::optional<Mat3> solve_essential(std::span<const Vec3> prev, std::span<const Vec3> curr);

/// Sampson distance (px) of a pixel correspondence under fundamental matrix F.
double sampson_distance(const Mat3& fundamental, Point2 prev, Point2 curr);

Mat3 fundamental_from_essential(const Mat3& essential, const CameraIntrinsics& intrinsics);

struct RigidMotion {
  Mat3 rotation;
  Vec3 translation;
};

/// The four (R, t) factorizations of an essential matrix.
std::array<RigidMotion, 4> decompose_essential(const Mat3& essential);

/// Number of normalized correspondences triangulating in front of both cameras.
std::size_t count_in_front(const RigidMotion& motion, std::span<const Vec3> prev, std::span<const Vec3> curr);

Mat3 skew(const Vec3& v);

/// Rotation angle of R in degrees.
double rotation_angle_deg(const Mat3& rotation);

/// Angle between two directions in degrees, ignoring sign.
double direction_angle_deg(const Vec3& a, const Vec3& b);

/// max(rotation error, translation direction error) in degrees. The translation
/// term is skipped when the true translation is zero and counts as 90 degrees
/// when the estimate flagged translation as unobservable.
double pose_error(const PoseEstimate& estimate, const Mat3& gt_rotation, const Vec3& gt_translation);

struct SuccessPoint {
  double threshold = 0.0;
  double ratio = 0.0;
};

/// Fraction of errors <= threshold for each threshold.
std::vector<SuccessPoint> pose_success_ratio(std::span<const double> errors, std::span<const double> thresholds);

struct Repeatability {
  double mean_error = 0.0;
  /// mean_error * 1000 / features_per_frame
  double per_1000_features = 0.0;
};

/// Mean L2 displacement of matches on a static scene.
Repeatability reprojection_repeatability(std::span<const Correspondence> matches, double features_per_frame);

}  // namespace grouptrack

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "grouptrack/features.hpp"
#include "grouptrack/geometry.hpp"

namespace grouptrack {

enum class CameraMotion { static_camera, translate, orbit };

/// Clustered landmark scene seen by a moving pinhole camera. Frame 0 is the
/// world frame; landmarks are laid out as compact pixel clusters in it.
struct SceneConfig {
  int width = 640;
  int height = 480;
  CameraIntrinsics intrinsics{500.0, 500.0, 320.0, 240.0};

  std::size_t clusters = 40;
  std::size_t points_per_cluster = 20;
  double cluster_radius_px = 10.0;
  double min_cluster_spacing_px = 60.0;
  std::size_t scattered_points = 0;  // landmarks outside any cluster
  double depth_min = 4.0;
  double depth_max = 12.0;
  double cluster_depth_spread = 0.05;  // relative depth variation inside a cluster
  bool planar = false;                 // all landmarks on the plane z = depth_min

  CameraMotion motion = CameraMotion::translate;
  Vec3 velocity{0.05, 0.0, 0.0};  // camera centre displacement per frame (world units)
  double yaw_rate_deg = 0.0;      // rotation about the camera y axis per frame
  double orbit_radius = 8.0;      // distance to the orbit centre on the optical axis
  std::size_t frames = 10;

  std::size_t descriptor_bits = 256;
  std::size_t bit_flips = 8;  // per frame, relative to the landmark's base descriptor
  double jitter_px = 0.3;     // std-dev of Gaussian position noise
  double outlier_rate = 0.1;  // fraction of emitted features that are clutter
  int border = kDescriptorBorder;
  std::uint64_t seed = 42;
};

/// Landmarks, their base descriptors and a validated camera trajectory.
class SyntheticScene {
 public:
  /// Throws ValidationError if any landmark is behind the camera in any frame.
  explicit SyntheticScene(const SceneConfig& config);

  /// Builds a scene from explicit data (validated the same way).
  SyntheticScene(const SceneConfig& config, std::vector<Vec3> points, std::vector<Descriptor> descriptors,
                 std::vector<Pose> trajectory);

  const SceneConfig& config() const noexcept { return config_; }
  const std::vector<Vec3>& points() const noexcept { return points_; }
  const std::vector<Descriptor>& descriptors() const noexcept { return descriptors_; }
  const std::vector<Pose>& trajectory() const noexcept { return trajectory_; }

 private:
  void validate() const;

  SceneConfig config_;
  std::vector<Vec3> points_;
  std::vector<Descriptor> descriptors_;
  std::vector<Pose> trajectory_;
};

struct GroundTruthPair {
  int frame_a = 0;
  int frame_b = 0;
  int id_a = 0;
  int id_b = 0;

  friend bool operator==(const GroundTruthPair&, const GroundTruthPair&) = default;
  friend auto operator<=>(const GroundTruthPair&, const GroundTruthPair&) = default;
};

struct GeneratedSequence {
  std::vector<FrameFeatures> frames;
  std::vector<GroundTruthPair> pairs;  // consecutive frames only
  std::vector<Pose> poses;             // world-to-camera per frame
  CameraIntrinsics intrinsics;
  std::vector<std::vector<int>> landmark_of;     // per frame and feature; -1 for clutter
  std::vector<std::vector<Point2>> clean_pixels;  // projection before jitter
};

/// Projects the scene into `frames` frames (<= trajectory length) and applies
/// jitter, bit flips and clutter. Landmarks within `border` px of the image edge
/// are not emitted. Deterministic in (scene, frames, seed).
GeneratedSequence generate_sequence(const SyntheticScene& scene, std::size_t frames, std::uint64_t seed);

/// Two calibrated views of random points with known relative motion.
struct TwoViewConfig {
  std::size_t points = 50;
  double outlier_fraction = 0.0;  // share of correspondences replaced by random pixel pairs
  double jitter_px = 0.0;
  double max_rotation_deg = 10.0;
  double baseline = 0.5;
  bool zero_motion = false;
  double depth_min = 4.0;
  double depth_max = 12.0;
  int width = 640;
  int height = 480;
  CameraIntrinsics intrinsics{500.0, 500.0, 320.0, 240.0};
  std::uint64_t seed = 1;
};

struct TwoViewProblem {
  std::vector<Correspondence> matches;
  std::vector<char> is_inlier;
  Pose motion;  // x_curr = R x_prev + t
};

TwoViewProblem make_two_view(const TwoViewConfig& config);

}  // namespace grouptrack

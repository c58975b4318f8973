#include "grouptrack/synthetic.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "grouptrack/error.hpp"
#include "random_util.hpp"

namespace grouptrack {

using detail::bounded;
using detail::normal;
using detail::uniform;

namespace {

Mat3 rotation_y(double radians) {
  return Eigen::AngleAxisd(radians, Vec3::UnitY()).toRotationMatrix();
}

Descriptor random_descriptor(std::size_t bits, std::mt19937_64& rng) {
  Descriptor d = Descriptor::zeros(bits);
  for (std::size_t i = 0; i < bits; ++i) {
    if (rng() & 1u) d.set_bit(i, true);
  }
  return d;
}

std::vector<Pose> make_trajectory(const SceneConfig& c) {
  std::vector<Pose> poses(c.frames);
  const double yaw = c.yaw_rate_deg * std::numbers::pi / 180.0;
  for (std::size_t k = 0; k < c.frames; ++k) {
    const double step = static_cast<double>(k);
    Mat3 cam_to_world = Mat3::Identity();
    Vec3 centre = Vec3::Zero();
    switch (c.motion) {
      case CameraMotion::static_camera:
        break;
      case CameraMotion::translate:
        cam_to_world = rotation_y(step * yaw);
        centre = step * c.velocity;
        break;
      case CameraMotion::orbit: {
        const Vec3 pivot(0.0, 0.0, c.orbit_radius);
        cam_to_world = rotation_y(step * yaw);
        centre = pivot + cam_to_world * (-pivot) + step * c.velocity;
        break;
      }
    }
    poses[k].rotation = cam_to_world.transpose();
    poses[k].translation = -poses[k].rotation * centre;
  }
  return poses;
}

}  // namespace

SyntheticScene::SyntheticScene(const SceneConfig& config) : config_(config) {
  if (config.frames == 0) {
    throw ValidationError("scene needs at least one frame");
  }
  if (config.descriptor_bits == 0 || config.descriptor_bits % 4 != 0) {
    throw ValidationError("descriptor bits must be a positive multiple of 4");
  }
  if (!(config.depth_min > 0.0) || config.depth_max < config.depth_min) {
    throw ValidationError("depth range must be positive and ordered");
  }
  config.intrinsics.validate(config.width, config.height);

  std::mt19937_64 rng(config.seed);
  const double r = config.cluster_radius_px;
  const double lo_x = config.border + r;
  const double hi_x = config.width - config.border - r;
  const double lo_y = config.border + r;
  const double hi_y = config.height - config.border - r;
  if (!(hi_x > lo_x && hi_y > lo_y)) {
    throw ValidationError("image too small for the requested cluster radius");
  }

  std::vector<Point2> centres;
  for (std::size_t c = 0; c < config.clusters; ++c) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const Point2 p{uniform(rng, lo_x, hi_x), uniform(rng, lo_y, hi_y)};
      const bool clear = std::all_of(centres.begin(), centres.end(), [&](Point2 q) {
        return std::hypot(p.x - q.x, p.y - q.y) >= config.min_cluster_spacing_px;
      });
      if (clear) {
        centres.push_back(p);
        break;
      }
    }
  }

  auto back_project = [&](Point2 pixel, double depth) { return depth * config.intrinsics.normalize(pixel); };

  for (const Point2 centre : centres) {
    const double depth = config.planar ? config.depth_min : uniform(rng, config.depth_min, config.depth_max);
    for (std::size_t i = 0; i < config.points_per_cluster; ++i) {
      const double rho = r * std::sqrt(detail::uniform01(rng));
      const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const Point2 pixel{centre.x + rho * std::cos(phi), centre.y + rho * std::sin(phi)};
      const double z = config.planar
                           ? depth
                           : depth * (1.0 + uniform(rng, -config.cluster_depth_spread, config.cluster_depth_spread));
      points_.push_back(back_project(pixel, z));
    }
  }
  for (std::size_t i = 0; i < config.scattered_points; ++i) {
    const Point2 pixel{uniform(rng, config.border, config.width - config.border),
                       uniform(rng, config.border, config.height - config.border)};
    const double z = config.planar ? config.depth_min : uniform(rng, config.depth_min, config.depth_max);
    points_.push_back(back_project(pixel, z));
  }
  descriptors_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    descriptors_.push_back(random_descriptor(config.descriptor_bits, rng));
  }
  trajectory_ = make_trajectory(config);
  validate();
}

SyntheticScene::SyntheticScene(const SceneConfig& config, std::vector<Vec3> points,
                               std::vector<Descriptor> descriptors, std::vector<Pose> trajectory)
    : config_(config),
      points_(std::move(points)),
      descriptors_(std::move(descriptors)),
      trajectory_(std::move(trajectory)) {
  if (points_.size() != descriptors_.size()) {
    throw ValidationError("every landmark needs a descriptor");
  }
  if (trajectory_.empty()) {
    throw ValidationError("scene needs at least one frame");
  }
  validate();
}

void SyntheticScene::validate() const {
  for (std::size_t k = 0; k < trajectory_.size(); ++k) {
    const Pose& pose = trajectory_[k];
    if ((pose.rotation * pose.rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9) {
      throw ValidationError("trajectory rotation " + std::to_string(k) + " is not orthonormal");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const Vec3 x = pose.rotation * points_[i] + pose.translation;
      if (!(x.z() > 1e-9)) {
        throw ValidationError("landmark " + std::to_string(i) + " is behind the camera in frame " +
                              std::to_string(k));
      }
    }
  }
}

GeneratedSequence generate_sequence(const SyntheticScene& scene, std::size_t frames, std::uint64_t seed) {
  const SceneConfig& c = scene.config();
  if (frames == 0 || frames > scene.trajectory().size()) {
    throw ValidationError("requested frame count exceeds the scene trajectory");
  }
  if (!(c.outlier_rate >= 0.0 && c.outlier_rate < 1.0)) {
    throw ValidationError("outlier rate must lie in [0, 1)");
  }
  if (c.bit_flips > c.descriptor_bits) {
    throw ValidationError("more bit flips than descriptor bits");
  }

  std::mt19937_64 rng(seed);
  GeneratedSequence seq;
  seq.intrinsics = c.intrinsics;
  seq.poses.assign(scene.trajectory().begin(), scene.trajectory().begin() + static_cast<std::ptrdiff_t>(frames));

  const double max_x = std::nextafter(static_cast<double>(c.width), 0.0);
  const double max_y = std::nextafter(static_cast<double>(c.height), 0.0);
  std::vector<std::vector<int>> feature_of_landmark(frames, std::vector<int>(scene.points().size(), -1));
  std::vector<std::size_t> flip_pool(c.descriptor_bits);

  for (std::size_t k = 0; k < frames; ++k) {
    const Pose& pose = scene.trajectory()[k];
    FrameFeatures frame;
    frame.frame_index = static_cast<int>(k);
    frame.width = c.width;
    frame.height = c.height;
    frame.descriptor_seed = seed;
    std::vector<int> landmark_of;
    std::vector<Point2> clean;

    for (std::size_t i = 0; i < scene.points().size(); ++i) {
      const Point2 p = c.intrinsics.project(pose.rotation * scene.points()[i] + pose.translation);
      if (p.x < c.border || p.y < c.border || p.x >= c.width - c.border || p.y >= c.height - c.border) {
        continue;
      }
      Feature f;
      f.id = static_cast<int>(frame.features.size());
      f.position = p;
      if (c.jitter_px > 0.0) {
        f.position.x = std::clamp(p.x + c.jitter_px * normal(rng), 0.0, max_x);
        f.position.y = std::clamp(p.y + c.jitter_px * normal(rng), 0.0, max_y);
      }
      f.response = 1.0;
      f.descriptor = scene.descriptors()[i];
      for (std::size_t b = 0; b < c.descriptor_bits; ++b) flip_pool[b] = b;
      for (std::size_t b = 0; b < c.bit_flips; ++b) {
        const std::size_t j = b + bounded(rng, c.descriptor_bits - b);
        std::swap(flip_pool[b], flip_pool[j]);
        f.descriptor.flip(flip_pool[b]);
      }
      feature_of_landmark[k][i] = f.id;
      landmark_of.push_back(static_cast<int>(i));
      clean.push_back(p);
      frame.features.push_back(std::move(f));
    }

    const double visible = static_cast<double>(frame.features.size());
    const auto clutter = static_cast<std::size_t>(std::lround(visible * c.outlier_rate / (1.0 - c.outlier_rate)));
    for (std::size_t j = 0; j < clutter; ++j) {
      Feature f;
      f.id = static_cast<int>(frame.features.size());
      f.position = {uniform(rng, c.border, c.width - c.border), uniform(rng, c.border, c.height - c.border)};
      f.response = 1.0;
      f.descriptor = random_descriptor(c.descriptor_bits, rng);
      landmark_of.push_back(-1);
      clean.push_back(f.position);
      frame.features.push_back(std::move(f));
    }

    seq.frames.push_back(std::move(frame));
    seq.landmark_of.push_back(std::move(landmark_of));
    seq.clean_pixels.push_back(std::move(clean));
  }

  for (std::size_t k = 1; k < frames; ++k) {
    for (std::size_t i = 0; i < scene.points().size(); ++i) {
      const int a = feature_of_landmark[k - 1][i];
      const int b = feature_of_landmark[k][i];
      if (a >= 0 && b >= 0) {
        seq.pairs.push_back({static_cast<int>(k - 1), static_cast<int>(k), a, b});
      }
    }
  }
  std::sort(seq.pairs.begin(), seq.pairs.end());
  return seq;
}

TwoViewProblem make_two_view(const TwoViewConfig& config) {
  config.intrinsics.validate(config.width, config.height);
  if (config.points < 8) {
    throw InvalidInput("two-view problem needs at least 8 points");
  }
  std::mt19937_64 rng(config.seed);
  TwoViewProblem problem;

  // Random motion: rotation about a random axis, translation of fixed length.
  if (!config.zero_motion) {
    Vec3 axis(normal(rng), normal(rng), normal(rng));
    axis.normalize();
    const double angle = uniform(rng, 0.0, config.max_rotation_deg) * std::numbers::pi / 180.0;
    problem.motion.rotation = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    Vec3 dir(normal(rng), normal(rng), normal(rng));
    problem.motion.translation = config.baseline * dir.normalized();
  }

  const auto outliers = static_cast<std::size_t>(std::lround(config.outlier_fraction * config.points));
  const std::size_t inliers = config.points - std::min(outliers, config.points);
  auto inside = [&](Point2 p) { return p.x >= 0.0 && p.y >= 0.0 && p.x < config.width && p.y < config.height; };

  std::size_t attempts = 0;
  while (problem.matches.size() < inliers) {
    if (++attempts > 100000) {
      throw ValidationError("could not place points visible in both views");
    }
    const Point2 pixel{uniform(rng, 0.0, config.width), uniform(rng, 0.0, config.height)};
    const double depth = uniform(rng, config.depth_min, config.depth_max);
    const Vec3 x1 = depth * config.intrinsics.normalize(pixel);
    const Vec3 x2 = problem.motion.rotation * x1 + problem.motion.translation;
    if (x2.z() < 0.1 * config.depth_min) continue;
    const Point2 p2 = config.intrinsics.project(x2);
    if (!inside(p2)) continue;
    Point2 a = pixel;
    Point2 b = p2;
    if (config.jitter_px > 0.0) {
      a = a + Point2{normal(rng), normal(rng)} * config.jitter_px;
      b = b + Point2{normal(rng), normal(rng)} * config.jitter_px;
    }
    problem.matches.push_back({a, b});
    problem.is_inlier.push_back(1);
  }
  for (std::size_t i = 0; i < config.points - inliers; ++i) {
    problem.matches.push_back({{uniform(rng, 0.0, config.width), uniform(rng, 0.0, config.height)},
                               {uniform(rng, 0.0, config.width), uniform(rng, 0.0, config.height)}});
    problem.is_inlier.push_back(0);
  }
  return problem;
}

}  // namespace grouptrack

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "grouptrack/geometry.hpp"
#include "grouptrack/synthetic.hpp"

namespace grouptrack {

struct PoseRecord {
  int frame = 0;
  Pose pose;  // world-to-camera
};

/// Contents of a ground-truth directory: pairs.txt, poses.txt and an optional
/// intrinsics.txt (`fx fy cx cy`).
struct GroundTruth {
  std::vector<GroundTruthPair> pairs;
  std::vector<PoseRecord> poses;
  CameraIntrinsics intrinsics;
  bool has_intrinsics = false;
};

void write_pairs(std::ostream& out, const std::vector<GroundTruthPair>& pairs);
std::vector<GroundTruthPair> read_pairs(std::istream& in, const std::string& source_name);

void write_poses(std::ostream& out, const std::vector<PoseRecord>& poses);
std::vector<PoseRecord> read_poses(std::istream& in, const std::string& source_name);

void write_intrinsics(std::ostream& out, const CameraIntrinsics& intrinsics);
CameraIntrinsics read_intrinsics(std::istream& in, const std::string& source_name);

GroundTruth load_ground_truth(const std::filesystem::path& dir);

/// Writes frame_NNNN.feat files plus pairs.txt, poses.txt and intrinsics.txt.
/// Returns the feature file paths in frame order.
std::vector<std::filesystem::path> save_sequence(const GeneratedSequence& sequence, const std::filesystem::path& dir);

}  // namespace grouptrack

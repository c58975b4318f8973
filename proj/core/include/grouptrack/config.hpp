#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "grouptrack/clustering.hpp"
#include "grouptrack/geometry.hpp"
#include "grouptrack/matching.hpp"
#include "grouptrack/synthetic.hpp"
#include "grouptrack/tracking.hpp"

namespace grouptrack {

enum class InputMode { images, features };

struct PipelineConfig {
  GroupingConfig grouping;
  double k = 2.0;
  double margin = kDefaultSearchMargin;
  Metric metric = Metric::hamming;
  std::size_t max_features = 7000;
  int fast_threshold = 5;
  /// Seeds every random number generator of a run (BRIEF pattern, grouping
  /// order, RANSAC). grouping.seed mirrors it.
  std::uint64_t seed = 42;
  InputMode input_mode = InputMode::features;
  std::string output_dir = "out";
  bool timing = true;
  bool track_dump = false;
  double ransac_threshold = 1.0;
  int ransac_iterations = 2000;
  CameraIntrinsics intrinsics;

  /// Throws ConfigError.
  void validate() const;
  /// Assigns one `key = value` setting; throws ConfigError on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  static const std::vector<std::string>& keys();
};

/// Flat `key = value` lines; `#` starts a comment. Keys are kebab-case.
std::string serialize(const PipelineConfig& config);
PipelineConfig parse_pipeline_config(std::istream& in, const std::string& source_name);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

void set_scene_value(SceneConfig& config, std::string_view key, std::string_view value);
std::string get_scene_value(const SceneConfig& config, std::string_view key);
const std::vector<std::string>& scene_keys();
std::string serialize(const SceneConfig& config);
SceneConfig parse_scene_config(std::istream& in, const std::string& source_name);
SceneConfig load_scene_config(const std::filesystem::path& path);

std::string_view to_string(InputMode mode);

}  // namespace grouptrack

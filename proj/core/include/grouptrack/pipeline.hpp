#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grouptrack/config.hpp"
#include "grouptrack/features.hpp"
#include "grouptrack/geometry.hpp"
#include "grouptrack/matching.hpp"
#include "grouptrack/tracking.hpp"

namespace grouptrack {

struct StageTimes {
  double detection = 0.0;
  double grouping = 0.0;
  double matching = 0.0;
  double filtering = 0.0;
  double total = 0.0;

  StageTimes& operator+=(const StageTimes& other);
};

struct FrameStats {
  int frame_index = 0;
  bool skipped = false;
  StageTimes ms;
  std::size_t features = 0;
  std::size_t groups = 0;
  std::size_t candidate_pairs = 0;
  std::size_t accepted_pairs = 0;
  std::size_t inlier_matches = 0;
  std::size_t support_sum = 0;  // sum of scores over accepted pairs
};

struct RunStats {
  std::vector<FrameStats> frames;

  StageTimes sum() const;
  /// Frames per second over the summed per-frame totals.
  double fps() const;
};

/// Inliers between two processed frames, with pixel positions resolved.
struct FramePairMatches {
  int frame_prev = 0;
  int frame_curr = 0;
  std::vector<InlierMatch> inliers;
  std::vector<Correspondence> points;  // aligned with inliers
  std::vector<GroupMatch> accepted;
  std::size_t candidate_pairs = 0;
};

struct TrackRecord {
  int frame = 0;
  int group_id = 0;
  Point2 centroid;
  Point2 displacement;
  int age = 0;
  std::size_t size = 0;
};

/// Sequential frame loop: group, intersect with predicted regions, match,
/// filter and advance the track state.
class Pipeline {
 public:
  /// Throws ConfigError if the configuration is invalid.
  explicit Pipeline(PipelineConfig config);

  /// Processes the next frame. Returns the matches against the previous
  /// processed frame, or nothing for the first frame and for skipped
  /// (featureless) frames.
  std::optional<FramePairMatches> push(FrameFeatures frame, double detection_ms = 0.0);

  const PipelineConfig& config() const noexcept { return config_; }
  const RunStats& stats() const noexcept { return stats_; }
  const std::vector<TrackRecord>& tracks() const noexcept { return tracks_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  const std::optional<TrackState>& state() const noexcept { return state_; }

 private:
  void record_tracks();

  PipelineConfig config_;
  std::optional<TrackState> state_;
  RunStats stats_;
  std::vector<TrackRecord> tracks_;
  std::vector<std::string> warnings_;
};

struct SequenceResult {
  std::vector<FramePairMatches> matches;
  std::vector<TrackRecord> tracks;
  RunStats stats;
  std::vector<std::string> warnings;
};

/// Runs the pipeline over in-memory frames. Throws InvalidInput for fewer than two frames.
SequenceResult run_sequence(const PipelineConfig& config, std::vector<FrameFeatures> frames);

/// Loads images or feature files (per config.input_mode) in order; frame i of
/// the sequence is inputs[i]. Unreadable frames abort with the frame index.
SequenceResult run_sequence(const PipelineConfig& config, std::span<const std::filesystem::path> inputs);

/// Loads frame `index` from `path`, returning detection time in milliseconds.
FrameFeatures load_frame(const PipelineConfig& config, const std::filesystem::path& path, int index,
                         double& detection_ms);

void write_matches(std::ostream& out, std::span<const FramePairMatches> matches);
void write_tracks(std::ostream& out, std::span<const TrackRecord> tracks);

struct StageShare {
  std::string stage;
  double percent = 0.0;
};

/// Detection, grouping, matching and filtering as percentages of their sum.
std::vector<StageShare> stage_breakdown(const StageTimes& times);

/// Machine-readable run report (JSON).
void write_stats(std::ostream& out, const PipelineConfig& config, const RunStats& stats);
/// Two columns: stage name and percent of frame time.
void write_stage_breakdown(std::ostream& out, const StageTimes& times);

/// Writes matches.txt, stats.json, stages.dat and (if enabled) tracks.txt into config.output_dir.
void write_outputs(const PipelineConfig& config, const SequenceResult& result);

}  // namespace grouptrack

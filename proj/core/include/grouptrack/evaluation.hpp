#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "grouptrack/config.hpp"
#include "grouptrack/geometry.hpp"
#include "grouptrack/ground_truth_io.hpp"
#include "grouptrack/pipeline.hpp"

namespace grouptrack {

/// Pose error thresholds (degrees) of the success curve.
const std::vector<double>& default_pose_thresholds();

struct PairEvaluation {
  int frame_prev = 0;
  int frame_curr = 0;
  std::size_t matches = 0;
  /// Matches found in the ground-truth pairs; nullopt without ground truth for this frame pair.
  std::optional<std::size_t> correct;
  /// Nullopt when fewer than 8 matches were available.
  std::optional<double> pose_error_deg;
  double inlier_ratio = 0.0;
  bool translation_observable = true;
};

struct EvalReport {
  std::vector<PairEvaluation> pairs;
  std::vector<SuccessPoint> success;  // frame pairs without a pose count as failures
  std::size_t poses_estimated = 0;
  double mean_inlier_ratio = 0.0;     // over frame pairs with an estimated pose
  std::optional<Repeatability> repeatability;
  std::size_t matches_checked = 0;
  std::size_t matches_correct = 0;
  std::optional<double> precision;
  double mean_features_per_frame = 0.0;
};

/// Throws ValidationError unless the ground truth has exactly one pose per
/// frame and every pair references existing frames and features.
void validate_alignment(const GroundTruth& gt, std::span<const FrameFeatures> frames);

/// Scores pipeline output against ground truth. Intrinsics come from the
/// ground truth when present, else from the config.
EvalReport evaluate(const PipelineConfig& config, std::span<const FrameFeatures> frames,
                    std::span<const FramePairMatches> matches, const GroundTruth& gt);

struct EvalRun {
  SequenceResult sequence;
  EvalReport report;
};

EvalRun run_eval(const PipelineConfig& config, std::span<const std::filesystem::path> inputs,
                 const std::filesystem::path& gt_dir);

/// Deterministic JSON report (no timings).
void write_eval_json(std::ostream& out, const EvalReport& report);
void write_eval_summary(std::ostream& out, const EvalReport& report);
/// Columns: threshold (deg), success ratio.
void write_success_curve(std::ostream& out, const EvalReport& report);
/// eval.json, summary.txt and pose_success.dat in `dir`.
void write_eval_outputs(const std::filesystem::path& dir, const EvalReport& report);

struct BenchResult {
  std::size_t repetitions = 0;
  /// Per-stage median over repetitions of the mean per-frame time (ms).
  StageTimes median_frame_ms;
  /// Median over repetitions of the median matching + filtering time of frames that were matched.
  double median_match_filter_ms = 0.0;
  double fps = 0.0;
  std::vector<StageShare> shares;
  std::vector<RunStats> runs;
};

/// Throws InvalidInput for repetitions < 1.
BenchResult bench(const PipelineConfig& config, std::span<const FrameFeatures> frames, std::size_t repetitions);
BenchResult bench(const PipelineConfig& config, std::span<const std::filesystem::path> inputs,
                  std::size_t repetitions);

void write_bench_json(std::ostream& out, const BenchResult& result);

}  // namespace grouptrack

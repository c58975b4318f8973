#include "grouptrack/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "grouptrack/error.hpp"
#include "grouptrack/feature_io.hpp"

namespace grouptrack {

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  return out;
}

}  // namespace

const std::vector<double>& default_pose_thresholds() {
  static const std::vector<double> thresholds = {0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 7.5, 10.0, 15.0, 20.0, 30.0};
  return thresholds;
}

void validate_alignment(const GroundTruth& gt, std::span<const FrameFeatures> frames) {
  std::vector<int> seen(frames.size(), 0);
  for (const auto& record : gt.poses) {
    if (record.frame < 0 || static_cast<std::size_t>(record.frame) >= frames.size()) {
      throw ValidationError("ground-truth pose for frame " + std::to_string(record.frame) + " but only " +
                            std::to_string(frames.size()) + " frames were given");
    }
    if (++seen[record.frame] > 1) {
      throw ValidationError("duplicate ground-truth pose for frame " + std::to_string(record.frame));
    }
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (seen[i] == 0) {
      throw ValidationError("no ground-truth pose for frame " + std::to_string(i));
    }
  }
  for (const auto& p : gt.pairs) {
    const auto n = static_cast<int>(frames.size());
    if (p.frame_a >= n || p.frame_b >= n) {
      throw ValidationError("ground-truth pair references frame beyond the input sequence");
    }
    if (static_cast<std::size_t>(p.id_a) >= frames[p.frame_a].features.size() ||
        static_cast<std::size_t>(p.id_b) >= frames[p.frame_b].features.size()) {
      throw ValidationError("ground-truth pair " + std::to_string(p.frame_a) + ":" + std::to_string(p.id_a) + " -> " +
                            std::to_string(p.frame_b) + ":" + std::to_string(p.id_b) +
                            " references a missing feature");
    }
  }
}

EvalReport evaluate(const PipelineConfig& config, std::span<const FrameFeatures> frames,
                    std::span<const FramePairMatches> matches, const GroundTruth& gt) {
  validate_alignment(gt, frames);
  std::vector<Pose> poses(frames.size());
  for (const auto& record : gt.poses) poses[record.frame] = record.pose;
  const CameraIntrinsics& intrinsics = gt.has_intrinsics ? gt.intrinsics : config.intrinsics;
  const std::set<GroundTruthPair> truth(gt.pairs.begin(), gt.pairs.end());
  std::set<std::pair<int, int>> covered;
  for (const auto& p : gt.pairs) covered.emplace(p.frame_a, p.frame_b);

  RansacConfig ransac;
  ransac.threshold = config.ransac_threshold;
  ransac.max_iterations = config.ransac_iterations;
  ransac.seed = config.seed;

  EvalReport report;
  std::vector<double> errors;
  std::vector<Correspondence> all_points;
  double inlier_ratio_sum = 0.0;
  for (const auto& pm : matches) {
    PairEvaluation pe;
    pe.frame_prev = pm.frame_prev;
    pe.frame_curr = pm.frame_curr;
    pe.matches = pm.inliers.size();
    if (covered.contains({pm.frame_prev, pm.frame_curr})) {
      std::size_t correct = 0;
      for (const auto& m : pm.inliers) {
        correct += truth.contains({pm.frame_prev, pm.frame_curr, m.feature_prev, m.feature_curr}) ? 1 : 0;
      }
      pe.correct = correct;
      report.matches_checked += pm.inliers.size();
      report.matches_correct += correct;
    }
    if (pm.points.size() >= 8) {
      const PoseEstimate estimate = estimate_essential_ransac(pm.points, intrinsics, ransac);
      const Pose rel = relative_pose(poses[pm.frame_prev], poses[pm.frame_curr]);
      pe.pose_error_deg = pose_error(estimate, rel.rotation, rel.translation);
      pe.inlier_ratio = estimate.inlier_ratio;
      pe.translation_observable = estimate.translation_observable;
      inlier_ratio_sum += estimate.inlier_ratio;
      ++report.poses_estimated;
    }
    errors.push_back(pe.pose_error_deg.value_or(std::numeric_limits<double>::infinity()));
    all_points.insert(all_points.end(), pm.points.begin(), pm.points.end());
    report.pairs.push_back(pe);
  }
  if (!errors.empty()) {
    report.success = pose_success_ratio(errors, default_pose_thresholds());
  }
  if (report.poses_estimated > 0) {
    report.mean_inlier_ratio = inlier_ratio_sum / static_cast<double>(report.poses_estimated);
  }
  double feature_sum = 0.0;
  for (const auto& f : frames) feature_sum += static_cast<double>(f.features.size());
  report.mean_features_per_frame = frames.empty() ? 0.0 : feature_sum / static_cast<double>(frames.size());
  if (!all_points.empty() && report.mean_features_per_frame > 0.0) {
    report.repeatability = reprojection_repeatability(all_points, report.mean_features_per_frame);
  }
  if (report.matches_checked > 0) {
    report.precision = static_cast<double>(report.matches_correct) / static_cast<double>(report.matches_checked);
  }
  return report;
}

EvalRun run_eval(const PipelineConfig& config, std::span<const std::filesystem::path> inputs,
                 const std::filesystem::path& gt_dir) {
  if (inputs.size() < 2) {
    throw InvalidInput("at least 2 frames are required");
  }
  const GroundTruth gt = load_ground_truth(gt_dir);
  Pipeline pipeline(config);
  std::vector<FrameFeatures> frames;
  std::vector<double> detection(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    frames.push_back(load_frame(pipeline.config(), inputs[i], static_cast<int>(i), detection[i]));
  }
  validate_alignment(gt, frames);

  EvalRun run;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (auto m = pipeline.push(frames[i], detection[i])) run.sequence.matches.push_back(std::move(*m));
  }
  run.sequence.tracks = pipeline.tracks();
  run.sequence.stats = pipeline.stats();
  run.sequence.warnings = pipeline.warnings();
  run.report = evaluate(pipeline.config(), frames, run.sequence.matches, gt);
  return run;
}

void write_eval_json(std::ostream& out, const EvalReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["frame_pairs"] = report.pairs.size();
  j["poses_estimated"] = report.poses_estimated;
  j["mean_inlier_ratio"] = report.mean_inlier_ratio;
  j["precision"] = report.precision ? ordered_json(*report.precision) : ordered_json(nullptr);
  j["matches_checked"] = report.matches_checked;
  j["matches_correct"] = report.matches_correct;
  j["mean_features_per_frame"] = report.mean_features_per_frame;
  if (report.repeatability) {
    j["repeatability"] = {{"mean_error_px", report.repeatability->mean_error},
                          {"per_1000_features", report.repeatability->per_1000_features}};
  } else {
    j["repeatability"] = nullptr;
  }
  ordered_json curve = ordered_json::array();
  for (const auto& p : report.success) curve.push_back({{"threshold_deg", p.threshold}, {"ratio", p.ratio}});
  j["pose_success"] = std::move(curve);
  ordered_json pairs = ordered_json::array();
  for (const auto& pe : report.pairs) {
    ordered_json e = {{"frame_prev", pe.frame_prev}, {"frame_curr", pe.frame_curr}, {"matches", pe.matches}};
    e["correct"] = pe.correct ? ordered_json(*pe.correct) : ordered_json(nullptr);
    e["pose_error_deg"] = pe.pose_error_deg ? ordered_json(*pe.pose_error_deg) : ordered_json(nullptr);
    e["inlier_ratio"] = pe.inlier_ratio;
    e["translation_observable"] = pe.translation_observable;
    pairs.push_back(std::move(e));
  }
  j["pairs"] = std::move(pairs);
  out << j.dump(2) << '\n';
}

void write_eval_summary(std::ostream& out, const EvalReport& report) {
  out << "frame pairs:          " << report.pairs.size() << '\n';
  out << "poses estimated:      " << report.poses_estimated << '\n';
  out << "mean inlier ratio:    " << format_double(report.mean_inlier_ratio) << '\n';
  out << "match precision:      " << (report.precision ? format_double(*report.precision) : "n/a") << " ("
      << report.matches_correct << '/' << report.matches_checked << ")\n";
  if (report.repeatability) {
    out << "repeatability (px):   " << format_double(report.repeatability->mean_error) << '\n';
    out << "  per 1000 features:  " << format_double(report.repeatability->per_1000_features) << '\n';
  } else {
    out << "repeatability (px):   n/a\n";
  }
  out << "pose success ratio:\n";
  for (const auto& p : report.success) {
    out << "  <= " << format_double(p.threshold) << " deg: " << format_double(p.ratio) << '\n';
  }
}

void write_success_curve(std::ostream& out, const EvalReport& report) {
  out << "# threshold_deg success_ratio\n";
  for (const auto& p : report.success) out << format_double(p.threshold) << ' ' << format_double(p.ratio) << '\n';
}

void write_eval_outputs(const std::filesystem::path& dir, const EvalReport& report) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_output(dir / "eval.json");
    write_eval_json(out, report);
  }
  {
    auto out = open_output(dir / "summary.txt");
    write_eval_summary(out, report);
  }
  {
    auto out = open_output(dir / "pose_success.dat");
    write_success_curve(out, report);
  }
}

namespace {

template <typename LoadFn>
BenchResult bench_impl(const PipelineConfig& config, std::size_t frame_count, std::size_t repetitions, LoadFn load) {
  if (repetitions < 1) {
    throw InvalidInput("bench needs at least one repetition");
  }
  if (frame_count < 2) {
    throw InvalidInput("at least 2 frames are required");
  }
  BenchResult result;
  result.repetitions = repetitions;
  std::vector<double> detection, grouping, matching, filtering, total, match_filter;
  for (std::size_t r = 0; r < repetitions; ++r) {
    Pipeline pipeline(config);
    for (std::size_t i = 0; i < frame_count; ++i) {
      double detection_ms = 0.0;
      FrameFeatures frame = load(i, detection_ms);
      pipeline.push(std::move(frame), detection_ms);
    }
    const RunStats& stats = pipeline.stats();
    const StageTimes sum = stats.sum();
    const auto n = static_cast<double>(stats.frames.size());
    detection.push_back(sum.detection / n);
    grouping.push_back(sum.grouping / n);
    matching.push_back(sum.matching / n);
    filtering.push_back(sum.filtering / n);
    total.push_back(sum.total / n);
    std::vector<double> per_frame;
    for (std::size_t i = 1; i < stats.frames.size(); ++i) {
      if (!stats.frames[i].skipped) per_frame.push_back(stats.frames[i].ms.matching + stats.frames[i].ms.filtering);
    }
    match_filter.push_back(median(per_frame));
    result.runs.push_back(stats);
  }
  result.median_frame_ms = {median(detection), median(grouping), median(matching), median(filtering), median(total)};
  result.median_match_filter_ms = median(match_filter);
  result.fps = result.median_frame_ms.total > 0.0 ? 1000.0 / result.median_frame_ms.total : 0.0;
  result.shares = stage_breakdown(result.median_frame_ms);
  return result;
}

}  // namespace

BenchResult bench(const PipelineConfig& config, std::span<const FrameFeatures> frames, std::size_t repetitions) {
  return bench_impl(config, frames.size(), repetitions, [&](std::size_t i, double& detection_ms) {
    detection_ms = 0.0;
    return frames[i];
  });
}

BenchResult bench(const PipelineConfig& config, std::span<const std::filesystem::path> inputs,
                  std::size_t repetitions) {
  return bench_impl(config, inputs.size(), repetitions, [&](std::size_t i, double& detection_ms) {
    return load_frame(config, inputs[i], static_cast<int>(i), detection_ms);
  });
}

void write_bench_json(std::ostream& out, const BenchResult& result) {
  using nlohmann::ordered_json;
  const auto& t = result.median_frame_ms;
  ordered_json j;
  j["repetitions"] = result.repetitions;
  j["median_frame_ms"] = {{"detection", t.detection},
                          {"grouping", t.grouping},
                          {"matching", t.matching},
                          {"filtering", t.filtering},
                          {"total", t.total}};
  j["median_match_filter_ms"] = result.median_match_filter_ms;
  j["fps"] = result.fps;
  ordered_json shares;
  for (const auto& s : result.shares) shares[s.stage] = s.percent;
  j["stage_percent"] = std::move(shares);
  out << j.dump(2) << '\n';
}

}  // namespace grouptrack

#include "grouptrack/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "grouptrack/clustering.hpp"
#include "grouptrack/error.hpp"
#include "grouptrack/feature_io.hpp"
#include "grouptrack/image.hpp"

namespace grouptrack {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

StageTimes& StageTimes::operator+=(const StageTimes& other) {
  detection += other.detection;
  grouping += other.grouping;
  matching += other.matching;
  filtering += other.filtering;
  total += other.total;
  return *this;
}

StageTimes RunStats::sum() const {
  StageTimes out;
  for (const auto& f : frames) out += f.ms;
  return out;
}

double RunStats::fps() const {
  const double total = sum().total;
  return total > 0.0 ? 1000.0 * static_cast<double>(frames.size()) / total : 0.0;
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  config_.grouping.seed = config_.seed;
  config_.validate();
}

std::optional<FramePairMatches> Pipeline::push(FrameFeatures frame, double detection_ms) {
  const auto start = Clock::now();
  FrameStats fs;
  fs.frame_index = frame.frame_index;
  fs.ms.detection = detection_ms;
  fs.features = frame.features.size();

  if (frame.features.empty()) {
    warnings_.push_back("frame " + std::to_string(frame.frame_index) + " has no features; skipped");
    fs.skipped = true;
    if (state_) state_ = widen(std::move(*state_), config_.margin);
    fs.ms.total = detection_ms + elapsed_ms(start);
    stats_.frames.push_back(fs);
    return std::nullopt;
  }

  auto t = Clock::now();
  Grouping grouping = group_features(frame, config_.grouping);
  fs.groups = grouping.groups.size();
  fs.ms.grouping = elapsed_ms(t);

  std::optional<FramePairMatches> out;
  if (!state_) {
    t = Clock::now();
    state_ = bootstrap(std::move(frame), std::move(grouping.groups), config_.margin);
    fs.ms.filtering = elapsed_ms(t);
  } else {
    t = Clock::now();
    const auto candidates = intersect_candidates(grouping.groups, *state_);
    auto scored = score_candidates(state_->groups, state_->frame.features, grouping.groups, frame.features,
                                   candidates, config_.k, config_.metric);
    fs.ms.matching = elapsed_ms(t);

    t = Clock::now();
    FrameMatchResult result = select_inliers(std::move(scored));
    FramePairMatches pm;
    pm.frame_prev = state_->frame.frame_index;
    pm.frame_curr = frame.frame_index;
    pm.candidate_pairs = candidates.size();
    pm.points.reserve(result.inliers.size());
    for (const auto& m : result.inliers) {
      pm.points.push_back({state_->frame.features[m.feature_prev].position, frame.features[m.feature_curr].position});
    }
    for (const auto& g : result.accepted) fs.support_sum += g.score;
    state_ = advance(*state_, std::move(frame), std::move(grouping.groups), result.accepted, config_.margin);
    pm.inliers = std::move(result.inliers);
    pm.accepted = std::move(result.accepted);
    fs.ms.filtering = elapsed_ms(t);

    fs.candidate_pairs = pm.candidate_pairs;
    fs.accepted_pairs = pm.accepted.size();
    fs.inlier_matches = pm.inliers.size();
    out = std::move(pm);
  }
  record_tracks();
  fs.ms.total = detection_ms + elapsed_ms(start);
  stats_.frames.push_back(fs);
  return out;
}

void Pipeline::record_tracks() {
  if (!config_.track_dump) return;
  for (std::size_t i = 0; i < state_->groups.size(); ++i) {
    const FeatureGroup& g = state_->groups[i];
    const auto& proxy = state_->proxies[i];
    tracks_.push_back({state_->frame.frame_index, g.id, g.centroid, proxy ? proxy->displacement : Point2{},
                       state_->age(i), g.size()});
  }
}

SequenceResult run_sequence(const PipelineConfig& config, std::vector<FrameFeatures> frames) {
  if (frames.size() < 2) {
    throw InvalidInput("at least 2 frames are required");
  }
  Pipeline pipeline(config);
  SequenceResult result;
  for (auto& frame : frames) {
    if (auto m = pipeline.push(std::move(frame))) result.matches.push_back(std::move(*m));
  }
  result.tracks = pipeline.tracks();
  result.stats = pipeline.stats();
  result.warnings = pipeline.warnings();
  return result;
}

FrameFeatures load_frame(const PipelineConfig& config, const std::filesystem::path& path, int index,
                         double& detection_ms) {
  const auto start = Clock::now();
  FrameFeatures frame;
  try {
    if (config.input_mode == InputMode::images) {
      const GrayImage image = load_image(path);
      frame = extract_features(image, {config.fast_threshold, config.max_features, config.seed}, index);
    } else {
      frame = load_features(path, index);
      if (frame.features.size() > config.max_features) {
        throw FormatError("feature count " + std::to_string(frame.features.size()) + " exceeds max-features");
      }
    }
  } catch (const Error& e) {
    throw InvalidInput("frame " + std::to_string(index) + " (" + path.string() + "): " + e.what());
  }
  detection_ms = elapsed_ms(start);
  return frame;
}

SequenceResult run_sequence(const PipelineConfig& config, std::span<const std::filesystem::path> inputs) {
  if (inputs.size() < 2) {
    throw InvalidInput("at least 2 frames are required");
  }
  Pipeline pipeline(config);
  SequenceResult result;
  std::size_t descriptor_bits = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    double detection_ms = 0.0;
    FrameFeatures frame = load_frame(pipeline.config(), inputs[i], static_cast<int>(i), detection_ms);
    if (!frame.features.empty()) {
      if (descriptor_bits != 0 && frame.descriptor_bits() != descriptor_bits) {
        throw InvalidInput("frame " + std::to_string(i) + ": descriptor length differs from earlier frames");
      }
      descriptor_bits = frame.descriptor_bits();
    }
    if (auto m = pipeline.push(std::move(frame), detection_ms)) result.matches.push_back(std::move(*m));
  }
  result.tracks = pipeline.tracks();
  result.stats = pipeline.stats();
  result.warnings = pipeline.warnings();
  return result;
}

void write_matches(std::ostream& out, std::span<const FramePairMatches> matches) {
  for (const auto& pm : matches) {
    for (std::size_t i = 0; i < pm.inliers.size(); ++i) {
      const auto& m = pm.inliers[i];
      const auto& p = pm.points[i];
      out << pm.frame_prev << ' ' << pm.frame_curr << ' ' << format_double(p.prev.x) << ' ' << format_double(p.prev.y)
          << ' ' << format_double(p.curr.x) << ' ' << format_double(p.curr.y) << ' ' << format_double(m.distance)
          << ' ' << m.group_prev << ' ' << m.group_curr << '\n';
    }
  }
}

void write_tracks(std::ostream& out, std::span<const TrackRecord> tracks) {
  for (const auto& t : tracks) {
    out << t.frame << ' ' << t.group_id << ' ' << format_double(t.centroid.x) << ' ' << format_double(t.centroid.y)
        << ' ' << format_double(t.displacement.x) << ' ' << format_double(t.displacement.y) << ' ' << t.age << ' '
        << t.size << '\n';
  }
}

std::vector<StageShare> stage_breakdown(const StageTimes& times) {
  const double parts[] = {times.detection, times.grouping, times.matching, times.filtering};
  const char* names[] = {"detection", "grouping", "matching", "filtering"};
  double sum = 0.0;
  for (double p : parts) sum += p;
  std::vector<StageShare> shares;
  for (int i = 0; i < 4; ++i) {
    shares.push_back({names[i], sum > 0.0 ? 100.0 * parts[i] / sum : 25.0});
  }
  return shares;
}

namespace {

nlohmann::ordered_json times_json(const StageTimes& t) {
  return {{"detection", t.detection},
          {"grouping", t.grouping},
          {"matching", t.matching},
          {"filtering", t.filtering},
          {"total", t.total}};
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  return out;
}

}  // namespace

void write_stats(std::ostream& out, const PipelineConfig& config, const RunStats& stats) {
  nlohmann::ordered_json report;
  nlohmann::ordered_json cfg;
  for (const auto& key : PipelineConfig::keys()) cfg[key] = config.get(key);
  report["config"] = cfg;
  nlohmann::ordered_json frames = nlohmann::ordered_json::array();
  std::size_t candidates = 0, accepted = 0, inliers = 0;
  for (const auto& f : stats.frames) {
    nlohmann::ordered_json j = {{"frame", f.frame_index},
                                {"skipped", f.skipped},
                                {"features", f.features},
                                {"groups", f.groups},
                                {"candidate_pairs", f.candidate_pairs},
                                {"accepted_pairs", f.accepted_pairs},
                                {"inlier_matches", f.inlier_matches}};
    if (config.timing) j["ms"] = times_json(f.ms);
    frames.push_back(std::move(j));
    candidates += f.candidate_pairs;
    accepted += f.accepted_pairs;
    inliers += f.inlier_matches;
  }
  report["frames"] = std::move(frames);
  nlohmann::ordered_json totals = {{"frames", stats.frames.size()},
                                   {"candidate_pairs", candidates},
                                   {"accepted_pairs", accepted},
                                   {"inlier_matches", inliers}};
  if (config.timing) {
    const StageTimes sum = stats.sum();
    totals["ms"] = times_json(sum);
    totals["fps"] = stats.fps();
    nlohmann::ordered_json shares;
    for (const auto& s : stage_breakdown(sum)) shares[s.stage] = s.percent;
    totals["stage_percent"] = shares;
  }
  report["totals"] = std::move(totals);
  out << report.dump(2) << '\n';
}

void write_stage_breakdown(std::ostream& out, const StageTimes& times) {
  out << "# stage percent\n";
  for (const auto& s : stage_breakdown(times)) out << s.stage << ' ' << format_double(s.percent) << '\n';
}

void write_outputs(const PipelineConfig& config, const SequenceResult& result) {
  const std::filesystem::path dir = config.output_dir;
  std::filesystem::create_directories(dir);
  {
    auto out = open_output(dir / "matches.txt");
    write_matches(out, result.matches);
  }
  {
    auto out = open_output(dir / "stats.json");
    write_stats(out, config, result.stats);
  }
  if (config.timing) {
    auto out = open_output(dir / "stages.dat");
    write_stage_breakdown(out, result.stats.sum());
  }
  if (config.track_dump) {
    auto out = open_output(dir / "tracks.txt");
    write_tracks(out, result.tracks);
  }
}

}  // namespace grouptrack

#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <sstream>

#include "grouptrack/cli.hpp"
#include "grouptrack/config.hpp"
#include "grouptrack/error.hpp"
#include "grouptrack/evaluation.hpp"
#include "grouptrack/feature_io.hpp"
#include "grouptrack/ground_truth_io.hpp"
#include "grouptrack/pipeline.hpp"
#include "scenarios.hpp"
#include "test_helpers.hpp"

using namespace grouptrack;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

PipelineConfig quiet_config() {
  PipelineConfig c;
  c.timing = false;
  return c;
}

}  // namespace

TEST(Config, DefaultsRoundTripToFixedPoint) {
  const std::string text = serialize(PipelineConfig{});
  std::istringstream in(text);
  EXPECT_EQ(serialize(parse_pipeline_config(in, "mem")), text);
}

TEST(Config, EveryKeyRoundTrips) {
  PipelineConfig c;
  c.set("window", "12.5");
  c.set("metric", "euclidean");
  c.set("input-mode", "images");
  c.set("track-dump", "1");
  c.set("seed", "7");
  c.set("fx", "612.25");
  EXPECT_EQ(c.grouping.seed, 7u);
  const std::string text = serialize(c);
  std::istringstream in(text);
  const PipelineConfig back = parse_pipeline_config(in, "mem");
  EXPECT_EQ(serialize(back), text);
  for (const auto& key : PipelineConfig::keys()) EXPECT_EQ(back.get(key), c.get(key)) << key;
}

TEST(Config, SceneRoundTrip) {
  SceneConfig s;
  set_scene_value(s, "motion", "orbit");
  set_scene_value(s, "yaw-rate", "1.5");
  const std::string text = serialize(s);
  std::istringstream in(text);
  EXPECT_EQ(serialize(parse_scene_config(in, "mem")), text);
}

TEST(Config, ErrorsAreConfigErrors) {
  PipelineConfig c;
  EXPECT_THROW(c.set("no-such-key", "1"), ConfigError);
  EXPECT_THROW(c.set("k", "abc"), ConfigError);
  EXPECT_THROW(c.set("metric", "cosine"), ConfigError);
  std::istringstream bad("window = 10\nbogus = 3\n");
  try {
    parse_pipeline_config(bad, "cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg:2"), std::string::npos);
  }
  c.set("min-group", "40");
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Pipeline, IdenticalFramesMatchThemselves) {
  SceneConfig s;
  s.motion = CameraMotion::static_camera;
  s.jitter_px = 0;
  s.bit_flips = 0;
  s.outlier_rate = 0;
  const auto seq = generate_sequence(SyntheticScene(s), 2, 1);
  Pipeline p(quiet_config());
  p.push(seq.frames[0]);
  const auto groups = p.state()->groups;
  const auto fp = p.push(seq.frames[1]);
  ASSERT_TRUE(fp);

  std::vector<char> self_accepted(groups.size(), 0);
  std::size_t cross = 0;
  for (const auto& m : fp->accepted) {
    if (m.group_prev == m.group_curr) {
      EXPECT_EQ(m.score, groups[m.group_prev].size());
      self_accepted[m.group_prev] = 1;
    } else {
      EXPECT_LT(m.score, std::min(groups[m.group_prev].size(), groups[m.group_curr].size()));
      ++cross;
    }
  }
  RecordProperty("accepted_cross_pairs", static_cast<int>(cross));
  for (char c : self_accepted) EXPECT_TRUE(c);

  std::size_t grouped = 0;
  for (const auto& g : groups) grouped += g.size();
  EXPECT_EQ(fp->inliers.size(), grouped);
  for (const auto& in : fp->inliers) {
    EXPECT_EQ(in.feature_prev, in.feature_curr);
    EXPECT_EQ(in.group_prev, in.group_curr);
  }
  EXPECT_EQ(reprojection_repeatability(fp->points, 1000).mean_error, 0.0);
}

TEST(Pipeline, SingleFrameIsRejected) {
  auto seq = scenario::translating(1, 0.1, 1);
  EXPECT_THROW(run_sequence(quiet_config(), seq.frames), InvalidInput);
}

TEST(Pipeline, TranslatingSequencePrecision) {
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto seq = scenario::translating(seed);
    const auto result = run_sequence(quiet_config(), seq.frames);
    sum += scenario::score_pipeline(result.matches, seq).precision();
  }
  EXPECT_GE(sum / 20.0, 0.95);
}

TEST(Pipeline, GroupFilteringBeatsRawMutualNn) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto seq = scenario::translating(seed, 0.2, 2);
    const auto result = run_sequence(quiet_config(), seq.frames);
    EXPECT_GE(scenario::score_pipeline(result.matches, seq).precision(),
              scenario::score_raw_mutual_nn(seq).precision())
        << seed;
  }
}

TEST(Pipeline, TemporalRecallIsComplete) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    EXPECT_EQ(scenario::temporal_recall(seed, 40, 6, kDefaultSearchMargin).recall(), 1.0) << seed;
  }
}

TEST(Pipeline, CandidatesPerGroupStaySmall) {
  const auto seq = scenario::translating(3);
  const auto result = run_sequence(quiet_config(), seq.frames);
  std::size_t candidates = 0, groups = 0;
  for (const auto& f : result.stats.frames) {
    if (f.frame_index == 0) continue;
    candidates += f.candidate_pairs;
    groups += f.groups;
  }
  ASSERT_GT(groups, 0u);
  const double mean = static_cast<double>(candidates) / static_cast<double>(groups);
  RecordProperty("mean_candidates_per_group", std::to_string(mean));
  EXPECT_LE(mean, 6.0);
}

TEST(Pipeline, EmptyFrameIsSkippedAndStateKept) {
  auto seq = scenario::translating(2, 0.1, 3);
  FrameFeatures empty;
  empty.frame_index = 1;
  empty.width = seq.frames[0].width;
  empty.height = seq.frames[0].height;
  Pipeline p(quiet_config());
  p.push(seq.frames[0]);
  const auto groups_before = p.state()->groups;
  EXPECT_FALSE(p.push(empty));
  EXPECT_EQ(p.warnings().size(), 1u);
  EXPECT_TRUE(p.stats().frames.back().skipped);
  EXPECT_EQ(p.state()->groups, groups_before);
  const auto fp = p.push(seq.frames[2]);
  ASSERT_TRUE(fp);
  EXPECT_EQ(fp->frame_prev, 0);
  EXPECT_EQ(fp->frame_curr, 2);
}

TEST(Pipeline, StatsAreConsistent) {
  const auto seq = scenario::translating(4);
  PipelineConfig c;
  const auto result = run_sequence(c, seq.frames);
  ASSERT_EQ(result.stats.frames.size(), seq.frames.size());
  for (const auto& f : result.stats.frames) {
    EXPECT_LE(f.accepted_pairs, f.candidate_pairs);
    EXPECT_LE(f.inlier_matches, f.support_sum);
    EXPECT_GE(f.ms.total + 1e-3, f.ms.detection + f.ms.grouping + f.ms.matching + f.ms.filtering);
  }
  EXPECT_GT(result.stats.fps(), 0.0);
}

TEST(Pipeline, DeterministicMatchFiles) {
  const auto seq = scenario::translating(5);
  std::ostringstream a, b;
  write_matches(a, run_sequence(quiet_config(), seq.frames).matches);
  write_matches(b, run_sequence(quiet_config(), seq.frames).matches);
  EXPECT_FALSE(a.str().empty());
  EXPECT_EQ(a.str(), b.str());
}

TEST(Bench, SingleRepetitionEqualsSingleRun) {
  const auto seq = scenario::translating(6, 0.1, 4);
  const auto r = bench(PipelineConfig{}, seq.frames, 1);
  ASSERT_EQ(r.runs.size(), 1u);
  const auto& run = r.runs[0];
  const StageTimes sum = run.sum();
  const double n = static_cast<double>(run.frames.size());
  EXPECT_DOUBLE_EQ(r.median_frame_ms.matching, sum.matching / n);
  EXPECT_DOUBLE_EQ(r.median_frame_ms.total, sum.total / n);
  double pct = 0.0;
  for (const auto& s : r.shares) pct += s.percent;
  EXPECT_NEAR(pct, 100.0, 1.0);
  EXPECT_THROW(bench(PipelineConfig{}, seq.frames, 0), InvalidInput);
}

TEST(Eval, StaticNoiselessSequence) {
  SceneConfig s;
  s.motion = CameraMotion::static_camera;
  s.jitter_px = 0;
  s.bit_flips = 0;
  s.outlier_rate = 0;
  const auto seq = generate_sequence(SyntheticScene(s), 10, 1);
  const auto dir = test::scratch_dir("eval_static");
  const auto paths = save_sequence(seq, dir);
  const auto run = run_eval(quiet_config(), paths, dir);
  ASSERT_TRUE(run.report.repeatability);
  EXPECT_EQ(run.report.repeatability->mean_error, 0.0);
  for (const auto& p : run.report.success) EXPECT_EQ(p.ratio, 1.0);
}

TEST(Eval, PoseErrorsFiniteAndReportsDeterministic) {
  const auto seq = scenario::translating(8, 0.1, 5);
  const auto dir = test::scratch_dir("eval_det");
  const auto paths = save_sequence(seq, dir);
  std::ostringstream a, b;
  const auto r1 = run_eval(quiet_config(), paths, dir);
  write_eval_json(a, r1.report);
  write_eval_json(b, run_eval(PipelineConfig{}, paths, dir).report);
  EXPECT_EQ(a.str(), b.str());
  for (const auto& p : r1.report.pairs) {
    if (p.matches >= 8) {
      ASSERT_TRUE(p.pose_error_deg);
      EXPECT_TRUE(std::isfinite(*p.pose_error_deg));
    }
  }
  ASSERT_TRUE(r1.report.precision);
  EXPECT_GE(*r1.report.precision, 0.95);
}

TEST(Eval, MisalignedGroundTruthIsValidationError) {
  const auto seq = scenario::translating(9, 0.1, 3);
  GroundTruth gt;
  gt.pairs = seq.pairs;
  for (std::size_t i = 0; i < 2; ++i) gt.poses.push_back({static_cast<int>(i), seq.poses[i]});
  EXPECT_THROW(validate_alignment(gt, seq.frames), ValidationError);
  gt.poses.push_back({2, seq.poses[2]});
  EXPECT_NO_THROW(validate_alignment(gt, seq.frames));
  gt.pairs.push_back({0, 1, 0, 100000});
  EXPECT_THROW(validate_alignment(gt, seq.frames), ValidationError);
}

TEST(Cli, MatchEvalAndExitCodes) {
  const auto dir = test::scratch_dir("cli");
  std::ofstream(dir / "scene.cfg") << "frames = 4\nseed = 3\n";
  std::string text;
  ASSERT_EQ(cli({"synth", (dir / "scene.cfg").string(), "--out", (dir / "seq").string()}, &text), kExitOk) << text;
  std::ofstream(dir / "run.cfg") << serialize(PipelineConfig{});

  const auto run = [&](const std::string& out) {
    return cli({"match", (dir / "run.cfg").string(), (dir / "seq").string(), "--output-dir", (dir / out).string(),
                "--timing", "false"},
               &text);
  };
  ASSERT_EQ(run("a"), kExitOk) << text;
  ASSERT_EQ(run("b"), kExitOk) << text;
  EXPECT_FALSE(slurp(dir / "a" / "matches.txt").empty());
  EXPECT_EQ(slurp(dir / "a" / "matches.txt"), slurp(dir / "b" / "matches.txt"));

  EXPECT_EQ(cli({"eval", (dir / "run.cfg").string(), (dir / "seq").string(), "--gt", (dir / "seq").string(),
                 "--output-dir", (dir / "e").string()},
                &text),
            kExitOk)
      << text;
  EXPECT_TRUE(fs::exists(dir / "e" / "pose_success.dat"));
  EXPECT_EQ(cli({"bench", (dir / "run.cfg").string(), (dir / "seq").string(), "--reps", "2", "--output-dir",
                 (dir / "bench").string()},
                &text),
            kExitOk)
      << text;

  EXPECT_EQ(cli({"match", (dir / "run.cfg").string(), (dir / "missing.feat").string(), (dir / "x.feat").string()}),
            kExitInput);
  EXPECT_EQ(cli({"match", (dir / "run.cfg").string(), (dir / "seq").string(), "--k", "-1"}), kExitConfig);
  EXPECT_EQ(cli({"match", (dir / "nope.cfg").string(), (dir / "seq").string()}), kExitConfig);
  EXPECT_EQ(cli({"frobnicate"}), kExitInput);
}

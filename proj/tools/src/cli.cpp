#include "grouptrack/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "grouptrack/config.hpp"
#include "grouptrack/error.hpp"
#include "grouptrack/evaluation.hpp"
#include "grouptrack/feature_io.hpp"
#include "grouptrack/ground_truth_io.hpp"
#include "grouptrack/pipeline.hpp"
#include "grouptrack/synthetic.hpp"

namespace grouptrack {

namespace {

namespace fs = std::filesystem;

struct PipelineArgs {
  std::string config_path;
  std::vector<std::string> inputs;
  std::map<std::string, std::string> overrides;
};

void add_pipeline_args(CLI::App* cmd, PipelineArgs& args) {
  cmd->add_option("config", args.config_path, "Pipeline config file (key = value lines)")->required();
  cmd->add_option("inputs", args.inputs, "Frame files in order, or directories of frames")->required();
  for (const auto& key : PipelineConfig::keys()) {
    cmd->add_option_function<std::string>(
        "--" + key, [&args, key](const std::string& v) { args.overrides[key] = v; },
        "Override '" + key + "'");
  }
}

bool is_frame_file(const fs::path& p, InputMode mode) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (mode == InputMode::features) return ext == ".feat";
  return ext == ".pgm" || ext == ".png";
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs, InputMode mode) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && is_frame_file(entry.path(), mode)) found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

PipelineConfig build_config(const PipelineArgs& args) {
  PipelineConfig config = load_pipeline_config(args.config_path);
  for (const auto& [key, value] : args.overrides) {
    try {
      config.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("--") + e.what());
    }
  }
  config.grouping.seed = config.seed;
  config.validate();
  return config;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  return out;
}

void report_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

int cmd_match(const PipelineArgs& args, std::ostream& out, std::ostream& err) {
  const PipelineConfig config = build_config(args);
  const auto inputs = expand_inputs(args.inputs, config.input_mode);
  const SequenceResult result = run_sequence(config, inputs);
  report_warnings(result.warnings, err);
  write_outputs(config, result);
  std::size_t inliers = 0;
  for (const auto& m : result.matches) inliers += m.inliers.size();
  out << "frames " << result.stats.frames.size() << ", frame pairs " << result.matches.size() << ", inliers "
      << inliers << " -> " << (fs::path(config.output_dir) / "matches.txt").string() << '\n';
  return kExitOk;
}

int cmd_eval(const PipelineArgs& args, const std::string& gt_dir, std::ostream& out, std::ostream& err) {
  const PipelineConfig config = build_config(args);
  const auto inputs = expand_inputs(args.inputs, config.input_mode);
  const EvalRun run = run_eval(config, inputs, gt_dir);
  report_warnings(run.sequence.warnings, err);
  write_outputs(config, run.sequence);
  write_eval_outputs(config.output_dir, run.report);
  write_eval_summary(out, run.report);
  return kExitOk;
}

int cmd_bench(const PipelineArgs& args, std::size_t reps, std::ostream& out) {
  const PipelineConfig config = build_config(args);
  const auto inputs = expand_inputs(args.inputs, config.input_mode);
  const BenchResult result = bench(config, inputs, reps);
  fs::create_directories(config.output_dir);
  {
    auto file = open_output(fs::path(config.output_dir) / "bench.json");
    write_bench_json(file, result);
  }
  {
    auto file = open_output(fs::path(config.output_dir) / "stages.dat");
    write_stage_breakdown(file, result.median_frame_ms);
  }
  const auto& t = result.median_frame_ms;
  out << "repetitions " << result.repetitions << '\n'
      << "median ms/frame: detection " << format_double(t.detection) << ", grouping " << format_double(t.grouping)
      << ", matching " << format_double(t.matching) << ", filtering " << format_double(t.filtering) << ", total "
      << format_double(t.total) << '\n'
      << "matching+filtering median ms/frame " << format_double(result.median_match_filter_ms) << '\n'
      << "fps " << format_double(result.fps) << '\n';
  for (const auto& s : result.shares) out << "  " << s.stage << ' ' << format_double(s.percent) << "%\n";
  return kExitOk;
}

int cmd_synth(const std::string& scene_path, const std::string& out_dir,
              const std::map<std::string, std::string>& overrides, std::ostream& out) {
  SceneConfig config = load_scene_config(scene_path);
  for (const auto& [key, value] : overrides) set_scene_value(config, key, value);
  const SyntheticScene scene(config);
  const GeneratedSequence seq = generate_sequence(scene, config.frames, config.seed);
  const auto paths = save_sequence(seq, out_dir);
  {
    auto file = open_output(fs::path(out_dir) / "scene.cfg");
    file << serialize(config);
  }
  out << "wrote " << paths.size() << " frames and " << seq.pairs.size() << " ground-truth pairs to " << out_dir
      << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Group-based feature matching for consecutive frames"};
  app.require_subcommand(1);

  PipelineArgs match_args;
  auto* match = app.add_subcommand("match", "Match consecutive frames");
  add_pipeline_args(match, match_args);

  PipelineArgs eval_args;
  std::string gt_dir;
  auto* eval = app.add_subcommand("eval", "Match and score against ground truth");
  add_pipeline_args(eval, eval_args);
  eval->add_option("--gt", gt_dir, "Ground-truth directory (pairs.txt, poses.txt)")->required();

  PipelineArgs bench_args;
  std::size_t reps = 5;
  auto* bench_cmd = app.add_subcommand("bench", "Time the pipeline stages");
  add_pipeline_args(bench_cmd, bench_args);
  bench_cmd->add_option("--reps", reps, "Repetitions")->check(CLI::PositiveNumber);

  std::string scene_path;
  std::string synth_out;
  std::map<std::string, std::string> scene_overrides;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic feature sequence with ground truth");
  synth->add_option("scene-config", scene_path, "Scene config file")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();
  for (const auto& key : scene_keys()) {
    synth->add_option_function<std::string>(
        "--" + key, [&scene_overrides, key](const std::string& v) { scene_overrides[key] = v; },
        "Override '" + key + "'");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  try {
    if (*match) return cmd_match(match_args, out, err);
    if (*eval) return cmd_eval(eval_args, gt_dir, out, err);
    if (*bench_cmd) return cmd_bench(bench_args, reps, out);
    if (*synth) return cmd_synth(scene_path, synth_out, scene_overrides, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidInput& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ValidationError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace grouptrack

#include <benchmark/benchmark.h>

#include "grouptrack/clustering.hpp"
#include "grouptrack/matching.hpp"
#include "grouptrack/pipeline.hpp"
#include "grouptrack/synthetic.hpp"
#include "grouptrack/tracking.hpp"

using namespace grouptrack;

namespace {

// Two consecutive 640x480 frames with 7000 features each.
const GeneratedSequence& dense_pair() {
  static const GeneratedSequence seq = [] {
    SceneConfig s;
    s.clusters = 400;
    s.points_per_cluster = 20;
    s.cluster_radius_px = 7.0;
    s.min_cluster_spacing_px = 22.0;
    s.frames = 2;
    auto out = generate_sequence(SyntheticScene(s), 2, 7);
    for (auto& f : out.frames) f.features.resize(std::min<std::size_t>(f.features.size(), 7000));
    return out;
  }();
  return seq;
}

void BM_GroupFeatures(benchmark::State& state) {
  const auto& frame = dense_pair().frames[0];
  for (auto _ : state) benchmark::DoNotOptimize(group_features(frame, {}));
  state.counters["features"] = static_cast<double>(frame.features.size());
}
BENCHMARK(BM_GroupFeatures)->Unit(benchmark::kMillisecond);

void BM_MutualNn(benchmark::State& state) {
  const auto& seq = dense_pair();
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::span<const Feature> a(seq.frames[0].features.data(), n);
  const std::span<const Feature> b(seq.frames[1].features.data(), n);
  for (auto _ : state) benchmark::DoNotOptimize(mutual_nn_match(a, b, Metric::hamming));
}
BENCHMARK(BM_MutualNn)->Arg(35)->Arg(256)->Arg(1024);

void BM_MatchFramePair(benchmark::State& state) {
  const auto& seq = dense_pair();
  const auto prev = group_features(seq.frames[0], {});
  const auto curr = group_features(seq.frames[1], {});
  const TrackState track = bootstrap(seq.frames[0], prev.groups);
  for (auto _ : state) {
    const auto candidates = intersect_candidates(curr.groups, track);
    benchmark::DoNotOptimize(match_frame_pair(prev.groups, seq.frames[0].features, curr.groups,
                                              seq.frames[1].features, candidates, 2.0, Metric::hamming));
  }
}
BENCHMARK(BM_MatchFramePair)->Unit(benchmark::kMillisecond);

void BM_PipelineFrame(benchmark::State& state) {
  const auto& seq = dense_pair();
  PipelineConfig c;
  c.timing = false;
  for (auto _ : state) {
    Pipeline p(c);
    p.push(seq.frames[0]);
    benchmark::DoNotOptimize(p.push(seq.frames[1]));
  }
}
BENCHMARK(BM_PipelineFrame)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

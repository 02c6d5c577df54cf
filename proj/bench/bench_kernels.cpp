// Sequential reference kernels against their OpenMP counterparts on a
// 64-system synthetic campaign. The thread count is the benchmark argument;
// the sequential variants ignore it.

#include <benchmark/benchmark.h>

#include "rareval/evaluation.hpp"
#include "rareval/stats.hpp"
#include "rareval/synth.hpp"

namespace {

using namespace rareval;

const Campaign& campaign() {
  static const Campaign c = [] {
    SynthSpec spec;
    spec.n_systems = 64;
    spec.n_topics = 50;
    return generate_campaign(spec);
  }();
  return c;
}

const RarityIndex& index() {
  static const RarityIndex i = RarityIndex::build(campaign());
  return i;
}

std::vector<MetricConfig> metrics() {
  return {parse_metric("P@100"), parse_metric("AP"), parse_metric("P@100_rareness(alpha=1)"),
          parse_metric("AP_rareness(alpha=1)")};
}

void BM_EvaluateSerial(benchmark::State& state) {
  const auto ms = metrics();
  for (auto _ : state) benchmark::DoNotOptimize(reference::evaluate_campaign(campaign(), index(), ms));
}

void BM_EvaluateParallel(benchmark::State& state) {
  const auto ms = metrics();
  EvalOptions opts;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_campaign(campaign(), index(), ms, opts));
}

const ScoreMatrix& matrix() {
  static const ScoreMatrix m = evaluate_campaign(campaign(), index(), parse_metric("AP_rareness(alpha=1)"));
  return m;
}

StabilityConfig stability_config(int threads) {
  StabilityConfig c;
  c.sample_size = 25;
  c.trials = 1000;
  c.threads = threads;
  return c;
}

void BM_StabilitySerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::stability(matrix(), stability_config(1)));
}

void BM_StabilityParallel(benchmark::State& state) {
  const auto config = stability_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(stability(matrix(), config));
}

SubsetExperimentConfig subset_config(int threads) {
  SubsetExperimentConfig c;
  c.subset_size = 16;
  c.trials = 200;
  c.threads = threads;
  return c;
}

void BM_SubsetSerial(benchmark::State& state) {
  const auto metric = parse_metric("P@100_rareness(alpha=1)");
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::subset_experiment(campaign(), metric, subset_config(1)));
}

void BM_SubsetParallel(benchmark::State& state) {
  const auto metric = parse_metric("P@100_rareness(alpha=1)");
  const auto config = subset_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(subset_experiment(campaign(), metric, config));
}

}  // namespace

BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StabilitySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StabilityParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SubsetSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SubsetParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  // Build the shared fixtures outside the timed regions.
  matrix();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}

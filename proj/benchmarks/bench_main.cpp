#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "emgpal/control/loop.hpp"
#include "emgpal/dsp/butterworth.hpp"
#include "emgpal/dsp/pipeline.hpp"
#include "emgpal/harness/experiment.hpp"
#include "emgpal/harness/generator.hpp"
#include "emgpal/transport/codec.hpp"

using namespace emgpal;

namespace {

std::vector<double> noise(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

void BM_FilterStream(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)));
  auto cascade = dsp::design_bandpass(dsp::SignalConfig{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsp::filter_stream(cascade, x));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FilterStream)->Arg(20)->Arg(2000)->Arg(200000);

void BM_PipelinePushFrame(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = noise(n);
  EmgFrame frame;
  frame.sample_rate_hz = 2000;
  frame.samples.assign(x.begin(), x.end());
  dsp::EnvelopePipeline pipeline{dsp::SignalConfig{}};
  std::uint64_t seq = 0;
  for (auto _ : state) {
    frame.seq = seq;
    frame.t_start_us = seq * n * 500;
    ++seq;
    benchmark::DoNotOptimize(pipeline.push(frame));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PipelinePushFrame)->Arg(20)->Arg(200);

void BM_Encode(benchmark::State& state) {
  EmgFrame f;
  f.sample_rate_hz = 2000;
  f.samples.assign(static_cast<std::size_t>(state.range(0)), 0.5f);
  for (auto _ : state) benchmark::DoNotOptimize(transport::encode_frame(f));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(transport::encoded_size(f.samples.size())));
}
BENCHMARK(BM_Encode)->Arg(20)->Arg(1000);

void BM_Decode(benchmark::State& state) {
  EmgFrame f;
  f.sample_rate_hz = 2000;
  f.samples.assign(static_cast<std::size_t>(state.range(0)), 0.5f);
  const auto bytes = transport::encode_frame(f);
  for (auto _ : state) benchmark::DoNotOptimize(transport::try_decode_frame(bytes));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_Decode)->Arg(20)->Arg(1000);

void BM_PidLoop(benchmark::State& state) {
  std::vector<render::PressureCommand> cmds;
  for (int i = 0; i <= 1000; ++i) cmds.push_back({i * 10000, 20.0 + 10.0 * ((i / 100) % 2)});
  for (auto _ : state) {
    plant::VacuumPlant plant{plant::PlantConfig{}};
    benchmark::DoNotOptimize(control::run_loop(control::PidGains{}, plant, cmds, 100));
  }
  state.SetItemsProcessed(state.iterations() * 1001);
}
BENCHMARK(BM_PidLoop);

void BM_DefaultExperiment(benchmark::State& state) {
  const harness::ExperimentConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_experiment(cfg));
}
BENCHMARK(BM_DefaultExperiment)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

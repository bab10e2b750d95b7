// Serial reference vs OpenMP batch kernels on the hot paths of one training update.
#include <benchmark/benchmark.h>

#include "maxentdp/envs.hpp"
#include "maxentdp/kernels.hpp"

using namespace maxentdp;

namespace {

struct Fixture {
  NoiseSchedule schedule;
  MixtureQ q{MixtureTarget::four_modes(), 0.05};
  DiffusionNet net;
  Mat states;
  Mat noisy;
  Vec times;

  explicit Fixture(int batch) {
    Rng rng(7);
    net = DiffusionNet(2, 2, 2, 64, rng);
    states = Mat::Random(2, batch);
    noisy = Mat::Random(2, batch);
    times = Vec::LinSpaced(batch, 0.05, 0.95);
  }
};

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

void BM_qne_targets(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)));
  const Box box = Box::symmetric(2, 1.0);
  for (auto _ : st)
    benchmark::DoNotOptimize(
        qne_targets(f.q, Mat(0, f.noisy.cols()), f.noisy, f.times, {500, 0.05}, box, f.schedule, Rng(1), exec_of(st)));
}

void BM_log_probs(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(log_probs(f.net, f.states, f.noisy, {20, 50}, f.schedule, Rng(2), exec_of(st)));
}

void BM_sample_actions(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)));
  SamplerConfig cfg;
  for (auto _ : st)
    benchmark::DoNotOptimize(sample_actions(f.net, f.states, f.states.cols(), cfg, f.schedule, Rng(3), exec_of(st)));
}

}  // namespace

BENCHMARK(BM_qne_targets)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_log_probs)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sample_actions)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <doctest.h>

#include <omp.h>

#include "maxentdp/envs.hpp"
#include "maxentdp/kernels.hpp"
#include "maxentdp/models.hpp"

using namespace maxentdp;

namespace {

const NoiseSchedule kSchedule;

// More threads than cores still interleaves the loop iterations.
struct ForceThreads {
  ForceThreads() : saved(omp_get_max_threads()) { omp_set_num_threads(4); }
  ~ForceThreads() { omp_set_num_threads(saved); }
  int saved;
};

Mat uniform(Eigen::Index rows, Eigen::Index cols, double lo, double hi, Rng& rng) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

}  // namespace

TEST_CASE("parallel kernels use more than one thread") {
  const ForceThreads force;
  CHECK(parallel_threads() == 4);
}

TEST_CASE("qne_targets: serial and parallel are bit-identical and match single calls") {
  const ForceThreads force;
  const MixtureQ q(MixtureTarget::four_modes(), 0.05);
  Rng rng(1);
  const int n = 48;
  const Mat noisy = uniform(2, n, -1.5, 1.5, rng);
  const Vec times = uniform(n, 1, 0.01, 0.95, rng);
  const Mat states(0, n);
  const EstimatorParams p{64, 0.05};
  const Box box = Box::symmetric(2, 1.0);
  const Rng base(2);
  const Mat serial = qne_targets(q, states, noisy, times, p, box, kSchedule, base, Exec::serial);
  const Mat parallel = qne_targets(q, states, noisy, times, p, box, kSchedule, base, Exec::parallel);
  CHECK(serial == parallel);
  for (int i = 0; i < n; i += 7) {
    Rng r = base.stream(static_cast<std::uint64_t>(i));
    CHECK(serial.col(i) == qne_target(q, Vec(), noisy.col(i), times[i], p, box, kSchedule, r));
  }
  CHECK(qne_targets(q, states, noisy, times, p, box, kSchedule, Rng(3), Exec::serial) != serial);
}

TEST_CASE("log_probs: serial and parallel are bit-identical with a state-conditioned network") {
  const ForceThreads force;
  Rng init(4);
  const DiffusionNet net(2, 3, 2, 16, init);
  Rng rng(5);
  const int n = 40;
  const Mat states = uniform(3, n, -5, 5, rng);
  const Mat actions = uniform(2, n, -1, 1, rng);
  const LikelihoodConfig cfg{8, 6};
  const Vec serial = log_probs(net, states, actions, cfg, kSchedule, Rng(6), Exec::serial);
  const Vec parallel = log_probs(net, states, actions, cfg, kSchedule, Rng(6), Exec::parallel);
  CHECK(serial == parallel);
  CHECK(serial.allFinite());
  CHECK_THROWS_AS(log_probs(net, states.leftCols(3), actions, cfg, kSchedule, Rng(6), Exec::serial),
                  std::invalid_argument);
}

TEST_CASE("sample_actions: serial and parallel are bit-identical") {
  const ForceThreads force;
  Rng init(7);
  const DiffusionNet net(2, 3, 2, 16, init);
  Rng rng(8);
  const Mat states = uniform(3, 33, -5, 5, rng);
  for (SamplerMethod method : {SamplerMethod::pf_ode, SamplerMethod::ancestral}) {
    CAPTURE(to_string(method));
    SamplerConfig cfg;
    cfg.method = method;
    cfg.steps = 6;
    const Mat serial = sample_actions(net, states, states.cols(), cfg, kSchedule, Rng(9), Exec::serial);
    const Mat parallel = sample_actions(net, states, states.cols(), cfg, kSchedule, Rng(9), Exec::parallel);
    CHECK(serial == parallel);
    Rng single = Rng(9).stream(4);
    CHECK(serial.col(4) == sample_action(net, states.col(4), cfg, kSchedule, single));
  }
}

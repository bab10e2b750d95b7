#include <doctest.h>

#include <cmath>

#include "maxentdp/rng.hpp"
#include "maxentdp/schedule.hpp"
#include "oracles.hpp"

using namespace maxentdp;

TEST_CASE("signal variance matches numerically integrated beta") {
  const NoiseSchedule s;
  for (double t : {0.0, 1e-3, 0.1, 0.37, 0.5, 0.9, 0.9946, 1.0})
    CHECK(s.signal_var(t) == doctest::Approx(oracle::signal_var_numeric(t)).epsilon(1e-9));
}

TEST_CASE("log_snr agrees with the signal variance through the sigmoid") {
  const NoiseSchedule s;
  for (int i = 1; i <= 100; ++i) {
    const double t = i / 100.0;
    CHECK(sigmoid(s.log_snr(t)) == doctest::Approx(s.signal_var(t)).epsilon(1e-12));
    CHECK(sigmoid(-s.log_snr(t)) == doctest::Approx(s.noise_var(t)).epsilon(1e-12));
  }
}

TEST_CASE("sigmoid identity and closed-form values") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(sigmoid(-std::log(3.0)) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) == 0.0);
  const NoiseSchedule s;
  for (int i = 0; i < 100; ++i) {
    const double t = i / 99.0;
    const auto [sig, noise] = s.signal_and_noise_var(t);
    CHECK(std::abs(sig + noise - 1.0) <= 1e-12);
    const double a = s.log_snr(std::max(t, 1e-6));
    CHECK(std::abs(sigmoid(a) + sigmoid(-a) - 1.0) <= 1e-12);
  }
}

TEST_CASE("log_snr is strictly decreasing") {
  const NoiseSchedule s;
  double prev = s.log_snr(0.0);
  CHECK(std::isinf(prev));
  for (int i = 1; i <= 100; ++i) {
    const double cur = s.log_snr(i / 100.0);
    CHECK(cur - prev < -1e-9);
    prev = cur;
  }
}

TEST_CASE("endpoint conditions") {
  const NoiseSchedule s;
  CHECK(s.signal_var(s.t_min()) >= 0.99);
  CHECK(s.signal_var(s.t_max()) <= 1e-2);
  CHECK(s.signal_var(s.t_max()) > 0.0);
}

TEST_CASE("times outside [0, 1] are domain errors") {
  const NoiseSchedule s;
  CHECK_THROWS_AS((void)s.log_snr(-0.01), std::domain_error);
  CHECK_THROWS_AS((void)s.signal_and_noise_var(1.01), std::domain_error);
  CHECK_THROWS_AS((void)s.drift_diffusion(2.0), std::domain_error);
  CHECK_THROWS_AS((void)s.log_snr(std::nan("")), std::domain_error);
}

TEST_CASE("bad schedule parameters are rejected") {
  CHECK_THROWS_AS(NoiseSchedule({0.0, 20.0, 1e-3, 0.99}), std::invalid_argument);
  CHECK_THROWS_AS(NoiseSchedule({1.0, 0.5, 1e-3, 0.99}), std::invalid_argument);
  CHECK_THROWS_AS(NoiseSchedule({0.1, 20.0, 0.5, 0.4}), std::invalid_argument);
}

TEST_CASE("drift and diffusion") {
  const NoiseSchedule s;
  const double h = 1e-5;
  for (int i = 1; i < 100; ++i) {
    const double t = i / 100.0;
    const auto [f, g2] = s.drift_diffusion(t);
    CHECK(f < 0.0);
    CHECK(g2 > 0.0);
    CHECK(g2 + 2.0 * f == 0.0);
    // f = (1/2) d/dt log sigma(alpha_t), by central differences.
    const double fd = 0.5 * (std::log(s.signal_var(t + h)) - std::log(s.signal_var(t - h))) / (2 * h);
    CHECK(std::abs(f - fd) <= 1e-4);
  }
}

TEST_CASE("perturb") {
  const NoiseSchedule s;
  const double t = 0.3;
  const auto [sig, noise] = s.signal_and_noise_var(t);
  Vec a0(2);
  a0 << 0.7, -0.2;

  SUBCASE("zero noise scales the signal") {
    const Vec at = s.perturb(a0, t, Vec::Zero(2));
    CHECK((at - std::sqrt(sig) * a0).norm() < 1e-15);
  }
  SUBCASE("zero signal leaves scaled noise") {
    const Vec e1 = Vec::Unit(2, 0);
    const Vec at = s.perturb(Vec::Zero(2), t, e1);
    CHECK((at - std::sqrt(noise) * e1).norm() < 1e-15);
  }
  SUBCASE("dimension mismatch") { CHECK_THROWS_AS((void)s.perturb(a0, t, Vec::Zero(3)), std::invalid_argument); }
}

TEST_CASE("perturb preserves unit variance for standard-normal inputs") {
  const NoiseSchedule s;
  const auto grid = s.uniform_grid(4);
  for (double t : grid) {
    Rng rng = Rng(5).stream(static_cast<std::uint64_t>(t * 1e6));
    const int n = 100000;
    Mat x(2, n);
    for (int i = 0; i < n; ++i) {
      Vec a0(2), eps(2);
      a0 << rng.normal(), rng.normal();
      eps << rng.normal(), rng.normal();
      x.col(i) = s.perturb(a0, t, eps);
    }
    const Vec mean = x.rowwise().mean();
    const Mat centered = x.colwise() - mean;
    const Mat cov = centered * centered.transpose() / (n - 1);
    CHECK((cov - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.02);
  }
}

TEST_CASE("uniform grid") {
  const NoiseSchedule s;
  CHECK_THROWS_AS((void)s.uniform_grid(0), std::invalid_argument);
  const auto g1 = s.uniform_grid(1);
  REQUIRE(g1.size() == 2);
  CHECK(g1[0] == s.t_min());
  CHECK(g1[1] == s.t_max());

  const auto g = s.uniform_grid(20);
  REQUIRE(g.size() == 21);
  CHECK(g.front() == 1e-3);
  CHECK(g.back() == 0.9946);
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] > g[i - 1]);
    CHECK(g[i] - g[i - 1] == doctest::Approx(0.049680).epsilon(1e-9));
  }
  for (int T : {2, 3, 7, 50, 333}) {
    const auto gt = s.uniform_grid(T);
    for (std::size_t i = 1; i < gt.size(); ++i) CHECK(gt[i] > gt[i - 1]);
  }
}

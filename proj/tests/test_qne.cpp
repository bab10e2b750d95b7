#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <vector>

#include "maxentdp/envs.hpp"
#include "maxentdp/qne.hpp"
#include "oracles.hpp"

using namespace maxentdp;

namespace {

const NoiseSchedule kSchedule;
const Box kBox = Box::symmetric(2, 1.0);

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec oracle_noise(const MixtureTarget& m, const Vec& a_t, double t) {
  return noise_from_score(mixture_score_oracle(m, a_t, t, kSchedule), t, kSchedule);
}

// Mean of a standard normal truncated to [a, b].
double truncated_mean(double a, double b) {
  const boost::math::normal n;
  return (boost::math::pdf(n, a) - boost::math::pdf(n, b)) / (boost::math::cdf(n, b) - boost::math::cdf(n, a));
}

class CountingNanQ final : public QFunction {
 public:
  explicit CountingNanQ(int nan_calls) : nan_calls_(nan_calls) {}
  [[nodiscard]] Vec values(const Eigen::Ref<const Vec>&, const Eigen::Ref<const Mat>& actions) const override {
    Vec q = -actions.colwise().squaredNorm().transpose();
    if (calls_++ < nan_calls_) q[0] = std::nan("");
    return q;
  }
  mutable int calls_ = 0;

 private:
  int nan_calls_;
};

const std::vector<Vec> kProbePoints = {v2(0, 0), v2(0.4, 0.4), v2(-0.6, 0.1)};

}  // namespace

TEST_CASE("truncated standard normal") {
  Rng rng(1);
  const int n = 100000;
  SUBCASE("wide interval behaves like N(0, 1)") {
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double x = sample_truncated_standard_normal(-10, 10, rng);
      s += x;
      s2 += x * x;
    }
    const double mean = s / n;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(std::sqrt(s2 / n - mean * mean) - 1.0) < 0.02);
  }
  SUBCASE("one-sided support") {
    for (int i = 0; i < n; ++i) CHECK(sample_truncated_standard_normal(0, 10, rng) >= 0);
  }
  SUBCASE("symmetric truncation has zero mean") {
    double s = 0;
    for (int i = 0; i < n; ++i) s += sample_truncated_standard_normal(-0.7, 0.7, rng);
    CHECK(std::abs(s / n) < 0.02);
  }
  SUBCASE("interval means match the closed form") {
    const std::pair<double, double> cases[] = {{-1.0, 2.0}, {0.5, 1.0}, {3.0, 4.0}, {-6.0, -5.0}, {-0.1, 0.1}};
    for (auto [a, b] : cases) {
      double s = 0;
      const int m = 40000;
      for (int i = 0; i < m; ++i) {
        const double x = sample_truncated_standard_normal(a, b, rng);
        REQUIRE(x >= a);
        REQUIRE(x <= b);
        s += x;
      }
      CHECK(s / m == doctest::Approx(truncated_mean(a, b)).epsilon(0.01));
    }
  }
  SUBCASE("far tails stay finite and in range") {
    for (auto [a, b] : {std::pair{38.0, 39.0}, std::pair{-60.0, -59.5}, std::pair{12.0, 1e3}}) {
      for (int i = 0; i < 1000; ++i) {
        const double x = sample_truncated_standard_normal(a, b, rng);
        REQUIRE(std::isfinite(x));
        CHECK(x >= a);
        CHECK(x <= b);
      }
    }
  }
  SUBCASE("empty intervals are argument errors") {
    CHECK_THROWS_AS(sample_truncated_standard_normal(1.0, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_truncated_standard_normal(2.0, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_truncated_standard_normal(v2(0, 0), v2(1, -1), rng), std::invalid_argument);
  }
}

TEST_CASE("candidate actions") {
  Rng rng(2);
  SUBCASE("affine relation between noise and candidates") {
    const Vec a_t = v2(0.3, -0.8);
    const double t = 0.4;
    const CandidateSet c = candidate_actions(kSchedule, a_t, t, 64, std::nullopt, rng);
    const auto [sig, noise] = kSchedule.signal_and_noise_var(t);
    const Mat expected = (a_t / std::sqrt(sig)).replicate(1, 64) + std::sqrt(noise / sig) * c.noise;
    CHECK((c.actions - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("K = 0 is an argument error") {
    CHECK_THROWS_AS(candidate_actions(kSchedule, v2(0, 0), 0.5, 0, kBox, rng), std::invalid_argument);
  }
  SUBCASE("K = 1 gives one candidate with weight 1") {
    const QuadraticQ q(1.0, v2(0, 0));
    CandidateSet c;
    const Vec eps = qne_target(q, Vec(), v2(0.2, 0.1), 0.5, {1, 0.05}, kBox, kSchedule, rng, &c);
    REQUIRE(c.weights.size() == 1);
    CHECK(c.weights[0] == 1.0);
    CHECK((eps + c.noise.col(0)).norm() == 0.0);
  }
  SUBCASE("every candidate lies in the box") {
    long outside = 0;
    for (int call = 0; call < 100000; ++call) {
      const Vec a_t = v2(rng.uniform(-3, 3), rng.uniform(-3, 3));
      const double t = rng.uniform(kSchedule.t_min(), kSchedule.t_max());
      const CandidateSet c = candidate_actions(kSchedule, a_t, t, 4, kBox, rng);
      for (Eigen::Index i = 0; i < c.actions.cols(); ++i)
        if (!kBox.contains(c.actions.col(i))) ++outside;
    }
    CHECK(outside == 0);
  }
  SUBCASE("candidate spread vanishes as t approaches t_min") {
    const Vec a_t = v2(0.5, -0.25);
    double prev = std::numeric_limits<double>::infinity();
    for (double t : {0.5, 0.1, 0.01, 1e-3, 1e-7}) {
      const CandidateSet c = candidate_actions(kSchedule, a_t, t, 200, std::nullopt, rng);
      const double spread = (c.actions.colwise() - a_t / std::sqrt(kSchedule.signal_var(t))).cwiseAbs().maxCoeff();
      CHECK(spread < prev);
      prev = spread;
    }
    CHECK(prev < 1e-3);
  }
}

TEST_CASE("softmax") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Vec logits(50);
    for (Eigen::Index i = 0; i < logits.size(); ++i) logits[i] = 100 * rng.normal();
    const Vec w = softmax(logits);
    CHECK(std::abs(w.sum() - 1.0) <= 1e-12);
    CHECK(w.minCoeff() >= 0.0);
    const Vec shifted = softmax((logits.array() + 1234.5).matrix());
    CHECK((w - shifted).cwiseAbs().maxCoeff() <= 1e-12);
  }
  const Vec huge = softmax(v2(1e308, 1e308 - 1e293));
  CHECK(huge.allFinite());
  CHECK_THROWS_AS(softmax(Vec()), std::invalid_argument);
}

TEST_CASE("qne target") {
  Rng rng(4);
  SUBCASE("equal Q gives the negated mean noise") {
    const FunctionQ q([](const Vec&, const Vec&) { return 3.0; });
    CandidateSet c;
    const Vec eps = qne_target(q, Vec(), v2(0.1, 0.2), 0.6, {32, 0.05}, kBox, kSchedule, rng, &c);
    CHECK((eps + c.noise.rowwise().mean()).norm() < 1e-12);
  }
  SUBCASE("small beta selects the best candidate") {
    const QuadraticQ q(1.0, v2(0.3, 0.3));
    CandidateSet c;
    const Vec eps = qne_target(q, Vec(), v2(0.1, 0.2), 0.6, {64, 1e-9}, kBox, kSchedule, rng, &c);
    Eigen::Index best = 0;
    c.q.maxCoeff(&best);
    CHECK((eps + c.noise.col(best)).norm() < 1e-12);
  }
  SUBCASE("convex-hull bound") {
    const MixtureQ q(MixtureTarget::four_modes(), 0.05);
    for (int call = 0; call < 2000; ++call) {
      const Vec a_t = v2(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
      const double t = rng.uniform(kSchedule.t_min(), kSchedule.t_max());
      CandidateSet c;
      const Vec eps = qne_target(q, Vec(), a_t, t, {16, 0.05}, kBox, kSchedule, rng, &c);
      CHECK(eps.cwiseAbs().maxCoeff() <= c.noise.cwiseAbs().maxCoeff() + 1e-12);
      CHECK(std::abs(c.weights.sum() - 1.0) <= 1e-12);
    }
  }
  SUBCASE("bad beta or K") {
    const QuadraticQ q(1.0, v2(0, 0));
    CHECK_THROWS_AS(qne_target(q, Vec(), v2(0, 0), 0.5, {10, 0.0}, kBox, kSchedule, rng), std::invalid_argument);
    CHECK_THROWS_AS(qne_target(q, Vec(), v2(0, 0), 0.5, {0, 0.05}, kBox, kSchedule, rng), std::invalid_argument);
  }
  SUBCASE("one non-finite Q is redrawn, a second one is fatal") {
    const CountingNanQ once(1);
    const Vec eps = qne_target(once, Vec(), v2(0, 0), 0.5, {10, 0.05}, kBox, kSchedule, rng);
    CHECK(eps.allFinite());
    CHECK(once.calls_ == 2);
    const CountingNanQ twice(2);
    CHECK_THROWS_AS(qne_target(twice, Vec(), v2(0, 0), 0.5, {10, 0.05}, kBox, kSchedule, rng), NumericError);
  }
  SUBCASE("same stream gives the same target") {
    const MixtureQ q(MixtureTarget::four_modes(), 0.05);
    Rng r1(77), r2(77);
    const Vec e1 = qne_target(q, Vec(), v2(0.2, -0.3), 0.4, {100, 0.05}, kBox, kSchedule, r1);
    const Vec e2 = qne_target(q, Vec(), v2(0.2, -0.3), 0.4, {100, 0.05}, kBox, kSchedule, r2);
    CHECK(e1 == e2);
  }
}

TEST_CASE("qne recovers the noised mixture score") {
  const MixtureTarget m = MixtureTarget::four_modes();
  const MixtureQ q(m, 0.05);
  // Single K = 1e4 estimates where the self-normalized estimate is well
  // resolved (t >= 0.5). At t = 0.1 the proposal is ~3x wider than a mixture
  // component, so the check is on the mean of 20 estimates instead.
  for (std::size_t p = 0; p < kProbePoints.size(); ++p) {
    const Vec& a_t = kProbePoints[p];
    for (double t : {0.5, 0.9}) {
      Rng rng = Rng(5).stream(p).stream(static_cast<std::uint64_t>(t * 10));
      const Vec eps = qne_target(q, Vec(), a_t, t, {10000, 0.05}, kBox, kSchedule, rng);
      const Vec exact = oracle_noise(m, a_t, t);
      if (exact.norm() > 0)
        CHECK((eps - exact).norm() / exact.norm() < 0.05);
      else
        CHECK(eps.norm() < 0.05);
    }
    Vec mean = Vec::Zero(2);
    for (int r = 0; r < 20; ++r) {
      Rng rng = Rng(6).stream(p).stream(static_cast<std::uint64_t>(r));
      mean += qne_target(q, Vec(), a_t, 0.1, {10000, 0.05}, kBox, kSchedule, rng) / 20.0;
    }
    const Vec exact = oracle_noise(m, a_t, 0.1);
    if (exact.norm() > 0)
      CHECK((mean - exact).norm() / exact.norm() < 0.05);
    else
      CHECK(mean.norm() < 0.05);
  }
}

TEST_CASE("qne error shrinks from K = 1e2 to K = 1e4") {
  const MixtureTarget m = MixtureTarget::four_modes();
  const MixtureQ q(m, 0.05);
  const Vec a_t = v2(0.4, 0.4);
  const double t = 0.5;
  const Vec exact = oracle_noise(m, a_t, t);
  int wins = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng = Rng(7).stream(static_cast<std::uint64_t>(trial));
    const Vec small = qne_target(q, Vec(), a_t, t, {100, 0.05}, kBox, kSchedule, rng);
    const Vec large = qne_target(q, Vec(), a_t, t, {10000, 0.05}, kBox, kSchedule, rng);
    if ((large - exact).norm() < (small - exact).norm()) ++wins;
  }
  CHECK(wins >= 95);
}

TEST_CASE("importance-sampling score estimate") {
  Rng rng(8);
  SUBCASE("constant Q with the matching Z gives unit weights") {
    const double c = 0.7;
    const FunctionQ q([c](const Vec&, const Vec&) { return c; });
    Rng r1(9), r2(9);
    const Vec s = is_score_estimate(q, Vec(), v2(0.1, 0.1), 0.5, {50, 0.05}, std::exp(c / 0.05), kSchedule, r1);
    const CandidateSet cands = candidate_actions(kSchedule, v2(0.1, 0.1), 0.5, 50, std::nullopt, r2);
    const Vec expected = cands.noise.rowwise().mean() / std::sqrt(kSchedule.noise_var(0.5));
    CHECK((s - expected).norm() < 1e-12);
  }
  SUBCASE("expectation is zero for constant Q") {
    const FunctionQ q([](const Vec&, const Vec&) { return 0.0; });
    Vec mean = Vec::Zero(2);
    for (int r = 0; r < 2000; ++r) mean += is_score_estimate(q, Vec(), v2(0, 0), 0.5, {10, 1.0}, 1.0, kSchedule, rng);
    CHECK((mean / 2000).norm() < 0.05);
  }
  SUBCASE("non-positive Z is rejected") {
    const QuadraticQ q(1.0, v2(0, 0));
    CHECK_THROWS_AS(is_score_estimate(q, Vec(), v2(0, 0), 0.5, {10, 0.05}, 0.0, kSchedule, rng),
                    std::invalid_argument);
  }
  SUBCASE("mean of 200 estimates matches the mixture score") {
    const MixtureTarget m = MixtureTarget::four_modes();
    const MixtureQ q(m, 0.05);
    for (std::size_t p = 0; p < kProbePoints.size(); ++p) {
      for (double t : {0.1, 0.5}) {
        const Vec& a_t = kProbePoints[p];
        const double log_z = m.log_candidate_partition(a_t, t, kSchedule);
        Vec mean = Vec::Zero(2);
        for (int r = 0; r < 200; ++r) {
          Rng local = Rng(10).stream(p).stream(static_cast<std::uint64_t>(r));
          mean += is_score_estimate_log(q, Vec(), a_t, t, {10000, 0.05}, log_z, kSchedule, local) / 200.0;
        }
        const Vec exact = mixture_score_oracle(m, a_t, t, kSchedule);
        if (exact.norm() > 0)
          CHECK((mean - exact).norm() / exact.norm() < 0.05);
        else
          CHECK(noise_from_score(mean, t, kSchedule).norm() < 0.05);
      }
    }
  }
  SUBCASE("self-normalization lowers the variance at K = 500") {
    const MixtureTarget m = MixtureTarget::four_modes();
    const MixtureQ q(m, 0.05);
    const double t = 0.5;
    const std::vector<ProbePoint> points{{v2(0.4, 0.4), t}, {v2(-0.6, 0.1), t}};
    const Estimator is = [&](const Vec& a, double tt, Rng& r) {
      return noise_from_score(is_score_estimate_log(q, Vec(), a, tt, {500, 0.05},
                                                    m.log_candidate_partition(a, tt, kSchedule), kSchedule, r),
                              tt, kSchedule);
    };
    const Estimator snis = [&](const Vec& a, double tt, Rng& r) {
      return qne_target(q, Vec(), a, tt, {500, 0.05}, std::nullopt, kSchedule, r);
    };
    const auto rep_is = estimator_std("is", is, points, 200, Rng(11));
    const auto rep_snis = estimator_std("qne", snis, points, 200, Rng(11));
    CHECK(rep_is.sample_std.mean() > rep_snis.sample_std.mean());
  }
}

TEST_CASE("idem target") {
  Rng rng(12);
  SUBCASE("linear Q makes the weights irrelevant") {
    const Vec v = v2(0.3, -1.2);
    const FunctionQ q([v](const Vec&, const Vec& a) { return v.dot(a); });
    const double t = 0.4;
    const auto [sig, noise] = kSchedule.signal_and_noise_var(t);
    const Vec expected = -std::sqrt(noise) * v / (std::sqrt(sig) * 0.05);
    const Vec got = idem_target(q, Vec(), v2(0.2, 0.1), t, {64, 0.05}, kBox, kSchedule, rng);
    CHECK((got - expected).norm() / expected.norm() < 1e-8);
  }
  SUBCASE("K = 1 uses the single candidate's gradient") {
    const QuadraticQ q(2.0, v2(0.1, 0.0));
    Rng r1(13), r2(13);
    const double t = 0.3;
    const Vec got = idem_target(q, Vec(), v2(0.2, 0.1), t, {1, 0.05}, kBox, kSchedule, r1);
    const CandidateSet c = candidate_actions(kSchedule, v2(0.2, 0.1), t, 1, kBox, r2);
    const Vec grad = q.action_gradients(Vec(), c.actions).col(0);
    const auto [sig, noise] = kSchedule.signal_and_noise_var(t);
    CHECK((got + std::sqrt(noise) * grad / (std::sqrt(sig) * 0.05)).norm() < 1e-12);
  }
  SUBCASE("agrees with the oracle and with qne near t_min") {
    const MixtureTarget m = MixtureTarget::four_modes();
    const MixtureQ q(m, 0.05);
    for (const Vec& a_t : {v2(0.4, 0.4), v2(-0.6, 0.1)}) {
      const double t = kSchedule.t_min();
      const Vec exact = oracle_noise(m, a_t, t);
      const Vec idem = idem_target(q, Vec(), a_t, t, {10000, 0.05}, kBox, kSchedule, rng);
      CHECK((idem - exact).norm() / exact.norm() < 0.05);
    }
  }
}

TEST_CASE("qsm target") {
  SUBCASE("quadratic Q") {
    const QuadraticQ q(0.5, v2(0, 0));  // Q = -|a|^2 / 2
    const Vec a_t = v2(0.3, -0.4);
    for (double t : {0.1, 0.5, 0.9}) {
      const Vec expected = std::sqrt(kSchedule.noise_var(t)) * a_t / 0.05;
      CHECK((qsm_target(q, Vec(), a_t, t, 0.05, kSchedule) - expected).norm() < 1e-12);
    }
  }
  SUBCASE("close to qne near t_min, far from the oracle at t = 0.9") {
    const MixtureTarget m = MixtureTarget::four_modes();
    const MixtureQ q(m, 0.05);
    for (const Vec& a_t : {v2(-0.6, 0.1), v2(0.3, -0.75)}) {
      Rng rng(14);
      const double t0 = kSchedule.t_min();
      const Vec qsm0 = qsm_target(q, Vec(), a_t, t0, 0.05, kSchedule);
      const Vec qne0 = qne_target(q, Vec(), a_t, t0, {10000, 0.05}, kBox, kSchedule, rng);
      CHECK((qsm0 - qne0).norm() / qne0.norm() < 0.1);

      const double t1 = 0.9;
      const Vec exact = oracle_noise(m, a_t, t1);
      const Vec qsm1 = qsm_target(q, Vec(), a_t, t1, 0.05, kSchedule);
      const Vec qne1 = qne_target(q, Vec(), a_t, t1, {10000, 0.05}, kBox, kSchedule, rng);
      CHECK((qsm1 - exact).norm() > 2.0 * (qne1 - exact).norm());
    }
  }
}

TEST_CASE("estimator_std") {
  const std::vector<ProbePoint> points{{v2(0.1, 0.2), 0.3}, {v2(-0.4, 0.0), 0.6}};
  SUBCASE("deterministic estimators have zero spread") {
    const QuadraticQ q(25.0, v2(0, 0));
    const Estimator qsm = [&](const Vec& a, double t, Rng&) { return qsm_target(q, Vec(), a, t, 0.05, kSchedule); };
    const auto rep = estimator_std("qsm", qsm, points, 10, Rng(15));
    CHECK(rep.sample_std.maxCoeff() < 1e-12);
    CHECK(rep.point_stds.size() == points.size());
  }
  SUBCASE("fewer than two repeats is an error") {
    const Estimator zero = [](const Vec& a, double, Rng&) { return Vec(Vec::Zero(a.size())); };
    CHECK_THROWS_AS(estimator_std("zero", zero, points, 1, Rng(16)), std::invalid_argument);
  }
  SUBCASE("qne spread falls as K grows") {
    const MixtureQ q(MixtureTarget::four_modes(), 0.05);
    std::vector<double> stds;
    for (int K : {50, 500}) {
      const Estimator qne = [&](const Vec& a, double t, Rng& r) {
        return qne_target(q, Vec(), a, t, {K, 0.05}, kBox, kSchedule, r);
      };
      stds.push_back(estimator_std("qne", qne, points, 200, Rng(17), K, 0.05).sample_std.mean());
    }
    CHECK(stds[1] < stds[0]);
  }
  SUBCASE("qne spread below idem on a steep quadratic") {
    const QuadraticQ q(25.0, v2(0, 0));
    const Estimator qne = [&](const Vec& a, double t, Rng& r) {
      return qne_target(q, Vec(), a, t, {500, 0.05}, kBox, kSchedule, r);
    };
    const Estimator idem = [&](const Vec& a, double t, Rng& r) {
      return idem_target(q, Vec(), a, t, {500, 0.05}, kBox, kSchedule, r);
    };
    const double s_qne = estimator_std("qne", qne, points, 200, Rng(18)).sample_std.mean();
    const double s_idem = estimator_std("idem", idem, points, 200, Rng(18)).sample_std.mean();
    CHECK(s_qne < s_idem);
  }
}

TEST_CASE("policy loss and gradient") {
  Rng rng(19);
  DiffusionNet net(2, 1, 2, 8, rng);
  Mat states(1, 3);
  states << 0.1, -0.2, 0.3;
  Mat noisy(2, 3);
  noisy << 0.1, 0.5, -0.3, 0.2, -0.7, 0.9;
  Vec times(3);
  times << 0.1, 0.5, 0.9;

  SUBCASE("targets equal to the output give zero loss and gradient") {
    const Mat out = net.predict(noisy, times, states);
    const PolicyLoss pl = policy_loss_and_grad(net, states, noisy, times, out);
    CHECK(pl.loss == 0.0);
    for (const auto& g : pl.grads) CHECK(g.weight.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("single sample loss and finite-difference gradient") {
    const Mat target = Mat::Constant(2, 1, 0.25);
    const PolicyLoss pl =
        policy_loss_and_grad(net, states.leftCols(1), noisy.leftCols(1), times.head(1), target);
    const Vec out = net.predict(noisy.leftCols(1), times.head(1), states.leftCols(1));
    CHECK(pl.loss == doctest::Approx((out - target).squaredNorm()).epsilon(1e-14));
    const double h = 1e-5;
    for (std::size_t layer = 0; layer < net.mlp().params().size(); ++layer) {
      for (Eigen::Index r = 0; r < net.mlp().params()[layer].weight.rows(); ++r) {
        auto loss_at = [&](double delta) {
          DiffusionNet n2 = net;
          n2.mlp().mutable_params()[layer].weight(r, 0) += delta;
          return policy_loss_and_grad(n2, states.leftCols(1), noisy.leftCols(1), times.head(1), target).loss;
        };
        const double fd = (loss_at(h) - loss_at(-h)) / (2 * h);
        const double g = pl.grads[layer].weight(r, 0);
        CHECK(std::abs(g - fd) <= 1e-4 * (std::abs(g) + std::abs(fd)) + 1e-9);
      }
    }
  }
  SUBCASE("duplicating the batch keeps the mean loss") {
    const Mat target = Mat::Zero(2, 3);
    const double base = policy_loss_and_grad(net, states, noisy, times, target).loss;
    Mat s2(1, 6), n2(2, 6), tg2 = Mat::Zero(2, 6);
    Vec t2(6);
    s2 << states, states;
    n2 << noisy, noisy;
    t2 << times, times;
    CHECK(policy_loss_and_grad(net, s2, n2, t2, tg2).loss == doctest::Approx(base).epsilon(1e-14));
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(policy_loss_and_grad(net, states, noisy, times, Mat::Zero(2, 2)), std::invalid_argument);
  }
}

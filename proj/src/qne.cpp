#include "maxentdp/qne.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maxentdp {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
// Beyond +-9 the standard normal has less than 1e-18 mass.
constexpr double kWide = 9.0;

double upper_tail_cdf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

// Normal conditioned on [lo, hi] far in the upper tail, where the inverse CDF
// underflows. Exponential proposal for wide intervals, uniform for narrow ones.
double tail_rejection(double lo, double hi, Rng& rng) {
  if (lo * (hi - lo) < 1.0) {
    for (;;) {
      const double z = lo + (hi - lo) * rng.uniform();
      if (rng.uniform() <= std::exp(0.5 * (lo * lo - z * z))) return z;
    }
  }
  const double lambda = 0.5 * (lo + std::sqrt(lo * lo + 4.0));
  for (;;) {
    const double z = lo - std::log1p(-rng.uniform()) / lambda;
    if (z > hi) continue;
    if (rng.uniform() <= std::exp(-0.5 * (z - lambda) * (z - lambda))) return z;
  }
}

// lo >= 0.
double upper_interval(double lo, double hi, Rng& rng) {
  const double ql = upper_tail_cdf(lo);
  const double qh = upper_tail_cdf(hi);
  if (ql < 1e-300 || !(ql > qh)) return tail_rejection(lo, hi, rng);
  for (;;) {
    const double u = qh + (ql - qh) * rng.uniform();
    if (u <= 0.0) continue;
    const double x = kSqrt2 * boost::math::erfc_inv(2.0 * u);
    return std::clamp(x, lo, hi);
  }
}

void check_beta(double beta) {
  if (!(beta > 0)) throw std::invalid_argument("estimator temperature beta must be positive");
}

void check_k(int K) {
  if (K < 1) throw std::invalid_argument("estimator needs K >= 1 candidates");
}

struct AffineMap {
  double inv_sqrt_signal;  // 1 / sqrt(s)
  double spread;           // sqrt((1 - s) / s)
};

AffineMap candidate_map(const NoiseSchedule& schedule, double t) {
  const auto [sig, noise] = schedule.signal_and_noise_var(t);
  return {1.0 / std::sqrt(sig), std::sqrt(noise / sig)};
}

void draw_candidate(const AffineMap& map, const Eigen::Ref<const Vec>& a_t, const std::optional<Box>& bounds,
                    Rng& rng, Eigen::Ref<Vec> noise, Eigen::Ref<Vec> action) {
  const Eigen::Index d = a_t.size();
  for (Eigen::Index j = 0; j < d; ++j) {
    const double center = a_t[j] * map.inv_sqrt_signal;
    if (bounds && map.spread > 0) {
      const double lo = (bounds->lo[j] - center) / map.spread;
      const double hi = (bounds->hi[j] - center) / map.spread;
      noise[j] = sample_truncated_standard_normal(lo, hi, rng);
    } else {
      noise[j] = rng.normal();
    }
    action[j] = center + map.spread * noise[j];
  }
  // Rounding in the affine map can overshoot the box by an ulp.
  if (bounds) action = bounds->clip(action);
}

}  // namespace

double sample_truncated_standard_normal(double lo, double hi, Rng& rng) {
  if (!(lo < hi)) throw std::invalid_argument("truncated normal requires lo < hi");
  if (lo <= -kWide && hi >= kWide) {
    for (;;) {
      const double x = rng.normal();
      if (x >= lo && x <= hi) return x;
    }
  }
  if (lo >= 0.0) return upper_interval(lo, hi, rng);
  if (hi <= 0.0) return -upper_interval(-hi, -lo, rng);
  const double pl = upper_tail_cdf(-lo);  // Phi(lo)
  const double ph = 1.0 - upper_tail_cdf(hi);
  for (;;) {
    const double u = pl + (ph - pl) * rng.uniform();
    if (u <= 0.0 || u >= 1.0) continue;
    const double x = -kSqrt2 * boost::math::erfc_inv(2.0 * u);
    return std::clamp(x, lo, hi);
  }
}

Vec sample_truncated_standard_normal(const Eigen::Ref<const Vec>& lo, const Eigen::Ref<const Vec>& hi, Rng& rng) {
  if (lo.size() != hi.size()) throw std::invalid_argument("truncated normal bound dimensions differ");
  Vec out(lo.size());
  for (Eigen::Index j = 0; j < lo.size(); ++j) out[j] = sample_truncated_standard_normal(lo[j], hi[j], rng);
  return out;
}

CandidateSet candidate_actions(const NoiseSchedule& schedule, const Eigen::Ref<const Vec>& a_t, double t, int K,
                               const std::optional<Box>& bounds, Rng& rng) {
  check_k(K);
  if (!a_t.allFinite()) throw std::invalid_argument("candidate_actions: a_t must be finite");
  if (bounds && bounds->dim() != a_t.size()) throw std::invalid_argument("candidate_actions: bounds dimension");
  const AffineMap map = candidate_map(schedule, t);
  CandidateSet c;
  c.noise.resize(a_t.size(), K);
  c.actions.resize(a_t.size(), K);
  for (int i = 0; i < K; ++i) draw_candidate(map, a_t, bounds, rng, c.noise.col(i), c.actions.col(i));
  return c;
}

Vec softmax(const Eigen::Ref<const Vec>& logits) {
  if (logits.size() == 0) throw std::invalid_argument("softmax of an empty vector");
  const double m = logits.maxCoeff();
  Vec e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

void score_candidates(const QFunction& q, const Eigen::Ref<const Vec>& state, CandidateSet& cands,
                      const NoiseSchedule& schedule, const Eigen::Ref<const Vec>& a_t, double t,
                      const std::optional<Box>& bounds, double beta, Rng& rng) {
  check_beta(beta);
  cands.q = q.values(state, cands.actions);
  if (cands.q.size() != cands.actions.cols()) throw std::invalid_argument("QFunction returned wrong count");
  std::vector<Eigen::Index> bad;
  for (Eigen::Index i = 0; i < cands.q.size(); ++i)
    if (!std::isfinite(cands.q[i])) bad.push_back(i);
  if (!bad.empty()) {
    const AffineMap map = candidate_map(schedule, t);
    Mat redrawn(a_t.size(), static_cast<Eigen::Index>(bad.size()));
    for (std::size_t k = 0; k < bad.size(); ++k) {
      draw_candidate(map, a_t, bounds, rng, cands.noise.col(bad[k]), cands.actions.col(bad[k]));
      redrawn.col(static_cast<Eigen::Index>(k)) = cands.actions.col(bad[k]);
    }
    const Vec again = q.values(state, redrawn);
    for (std::size_t k = 0; k < bad.size(); ++k) {
      if (!std::isfinite(again[static_cast<Eigen::Index>(k)]))
        throw NumericError("non-finite Q value on a resampled candidate (t = " + std::to_string(t) + ")");
      cands.q[bad[k]] = again[static_cast<Eigen::Index>(k)];
    }
  }
  cands.weights = softmax(cands.q / beta);
}

Vec qne_target(const QFunction& q, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t, double t,
               const EstimatorParams& p, const std::optional<Box>& bounds, const NoiseSchedule& schedule, Rng& rng,
               CandidateSet* diagnostics) {
  check_beta(p.beta);
  CandidateSet c = candidate_actions(schedule, a_t, t, p.K, bounds, rng);
  score_candidates(q, state, c, schedule, a_t, t, bounds, p.beta, rng);
  Vec target = -(c.noise * c.weights);
  if (diagnostics) *diagnostics = std::move(c);
  return target;
}

Vec is_score_estimate_log(const QFunction& q, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t,
                          double t, const EstimatorParams& p, double log_Z, const NoiseSchedule& schedule, Rng& rng) {
  check_beta(p.beta);
  CandidateSet c = candidate_actions(schedule, a_t, t, p.K, std::nullopt, rng);
  score_candidates(q, state, c, schedule, a_t, t, std::nullopt, p.beta, rng);
  const Vec w = (c.q.array() / p.beta - log_Z).exp().matrix();
  const double noise = schedule.noise_var(t);
  return (c.noise * w) / (static_cast<double>(p.K) * std::sqrt(noise));
}

Vec is_score_estimate(const QFunction& q, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t,
                      double t, const EstimatorParams& p, double Z, const NoiseSchedule& schedule, Rng& rng) {
  if (!(Z > 0)) throw std::invalid_argument("is_score_estimate: Z must be positive");
  return is_score_estimate_log(q, state, a_t, t, p, std::log(Z), schedule, rng);
}

Vec idem_target(const QFunction& q, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t, double t,
                const EstimatorParams& p, const std::optional<Box>& bounds, const NoiseSchedule& schedule, Rng& rng) {
  check_beta(p.beta);
  CandidateSet c = candidate_actions(schedule, a_t, t, p.K, bounds, rng);
  score_candidates(q, state, c, schedule, a_t, t, bounds, p.beta, rng);
  const Mat grads = q.action_gradients(state, c.actions);
  const auto [sig, noise] = schedule.signal_and_noise_var(t);
  const Vec score = (grads * c.weights) / (p.beta * std::sqrt(sig));
  return -std::sqrt(noise) * score;
}

Vec qsm_target(const QFunction& q, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t, double t,
               double beta, const NoiseSchedule& schedule) {
  check_beta(beta);
  const Mat grad = q.action_gradients(state, a_t);
  return -std::sqrt(schedule.noise_var(t)) * grad.col(0) / beta;
}

Vec score_from_noise(const Eigen::Ref<const Vec>& eps, double t, const NoiseSchedule& schedule) {
  return -eps / std::sqrt(schedule.noise_var(t));
}

Vec noise_from_score(const Eigen::Ref<const Vec>& score, double t, const NoiseSchedule& schedule) {
  return -std::sqrt(schedule.noise_var(t)) * score;
}

EstimatorReport estimator_std(std::string name, const Estimator& estimator, std::span<const ProbePoint> points,
                              int repeats, const Rng& rng, int K, double beta, double jitter) {
  if (repeats < 2) throw std::invalid_argument("estimator_std needs at least 2 repeats");
  if (points.empty()) throw std::invalid_argument("estimator_std needs at least one point");
  EstimatorReport rep;
  rep.name = std::move(name);
  rep.K = K;
  rep.beta = beta;
  const Eigen::Index d = points.front().a_t.size();
  rep.mean_estimate = Vec::Zero(d);
  rep.sample_std = Vec::Zero(d);
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const Rng point_rng = rng.stream(pi);
    Mat draws(d, repeats);
    for (int r = 0; r < repeats; ++r) {
      Rng local = point_rng.stream(static_cast<std::uint64_t>(r));
      Vec query = points[pi].a_t;
      if (jitter > 0)
        for (Eigen::Index j = 0; j < d; ++j) query[j] += jitter * local.normal();
      draws.col(r) = estimator(query, points[pi].t, local);
    }
    const Vec mean = draws.rowwise().mean();
    const Vec var = (draws.colwise() - mean).rowwise().squaredNorm() / static_cast<double>(repeats - 1);
    rep.point_means.push_back(mean);
    rep.point_stds.push_back(var.cwiseSqrt());
    rep.mean_estimate += mean;
    rep.sample_std += rep.point_stds.back();
  }
  rep.mean_estimate /= static_cast<double>(points.size());
  rep.sample_std /= static_cast<double>(points.size());
  return rep;
}

PolicyLoss policy_loss_and_grad(const DiffusionNet& net, const Eigen::Ref<const Mat>& states,
                                const Eigen::Ref<const Mat>& noisy, const Eigen::Ref<const Vec>& times,
                                const Eigen::Ref<const Mat>& targets) {
  if (targets.rows() != net.action_dim() || targets.cols() != noisy.cols())
    throw std::invalid_argument("policy_loss_and_grad: target shape mismatch");
  if (noisy.cols() == 0) throw std::invalid_argument("policy_loss_and_grad: empty batch");
  Tape tape;
  const Mat out = net.mlp().forward(net.build_input(noisy, times, states), tape);
  const Mat diff = out - targets;
  const double n = static_cast<double>(noisy.cols());
  PolicyLoss res;
  res.loss = diff.squaredNorm() / n;
  res.grads = net.mlp().backward(tape, (2.0 / n) * diff).grads;
  return res;
}

}  // namespace maxentdp

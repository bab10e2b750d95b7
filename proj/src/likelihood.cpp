#include "maxentdp/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maxentdp {

namespace {

Mat draw_noise(Eigen::Index d, int n, Rng& rng) {
  Mat eps(d, n);
  for (int j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < d; ++i) eps(i, j) = rng.normal();
  return eps;
}

Mat repeat_state(const Eigen::Ref<const Vec>& state, Eigen::Index n) { return state.replicate(1, n); }

}  // namespace

void LikelihoodConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("likelihood.steps must be >= 1");
  if (samples < 1) throw std::invalid_argument("likelihood.samples must be >= 1");
}

double log_prob_constant(int dim) { return -0.5 * dim * std::log(2.0 * std::numbers::pi * std::numbers::e); }

double integration_weight_from_signal(double signal_prev, double signal_cur) {
  if (signal_prev < signal_cur) throw std::invalid_argument("integration_weight: times in reversed order");
  if (!(signal_cur > 0.0 && signal_cur < 1.0)) throw std::invalid_argument("integration_weight: signal outside (0, 1)");
  return (signal_prev - signal_cur) / (signal_cur * (1.0 - signal_cur));
}

double integration_weight(const NoiseSchedule& schedule, double t_prev, double t_cur) {
  if (t_prev > t_cur) throw std::invalid_argument("integration_weight: t_prev must not exceed t_cur");
  return integration_weight_from_signal(schedule.signal_var(t_prev), schedule.signal_var(t_cur));
}

double noise_pred_error(const NoiseModel& model, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a0,
                        double t, int N, const NoiseSchedule& schedule, Rng& rng) {
  if (N < 1) throw std::invalid_argument("noise_pred_error: N must be >= 1");
  const auto [sig, noise] = schedule.signal_and_noise_var(t);
  const Mat eps = draw_noise(a0.size(), N, rng);
  const Mat noisy = (std::sqrt(noise) * eps).colwise() + std::sqrt(sig) * a0;
  const Mat pred = model.predict(noisy, Vec::Constant(N, t), repeat_state(state, N));
  return (eps - pred).squaredNorm() / N;
}

LogProbEstimate log_prob(const NoiseModel& model, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a0,
                         const LikelihoodConfig& cfg, const NoiseSchedule& schedule, const Rng& base) {
  cfg.validate();
  const int T = cfg.steps;
  const int N = cfg.samples;
  const Eigen::Index d = a0.size();
  const auto grid = schedule.uniform_grid(T);

  // All T * N perturbed actions go through the model in one batch.
  Mat eps(d, static_cast<Eigen::Index>(T) * N);
  Mat noisy(d, eps.cols());
  Vec times(eps.cols());
  for (int i = 1; i <= T; ++i) {
    Rng rng = base.stream(static_cast<std::uint64_t>(i));
    const auto [sig, noise] = schedule.signal_and_noise_var(grid[i]);
    const auto cols = Eigen::seqN(static_cast<Eigen::Index>(i - 1) * N, N);
    eps(Eigen::all, cols) = draw_noise(d, N, rng);
    noisy(Eigen::all, cols) = (std::sqrt(noise) * eps(Eigen::all, cols)).colwise() + std::sqrt(sig) * a0;
    times(cols).setConstant(grid[i]);
  }
  const Mat pred = model.predict(noisy, times, repeat_state(state, eps.cols()));

  LogProbEstimate out;
  out.contributions.resize(static_cast<std::size_t>(T));
  double total = 0;
  for (int i = 1; i <= T; ++i) {
    const auto cols = Eigen::seqN(static_cast<Eigen::Index>(i - 1) * N, N);
    const double err = (eps(Eigen::all, cols) - pred(Eigen::all, cols)).squaredNorm() / N;
    const double s_prev = schedule.signal_var(grid[i - 1]);
    const double s_cur = schedule.signal_var(grid[i]);
    const double c = integration_weight_from_signal(s_prev, s_cur) * (static_cast<double>(d) * s_cur - err);
    out.contributions[static_cast<std::size_t>(i - 1)] = c;
    total += c;
  }
  out.value = log_prob_constant(static_cast<int>(d)) + 0.5 * total;
  return out;
}

double entropy_term(const NoiseModel& model, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& action,
                    const LikelihoodConfig& cfg, const NoiseSchedule& schedule, const Rng& base) {
  return log_prob(model, state, action, cfg, schedule, base).value;
}

}  // namespace maxentdp

#include "maxentdp/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace maxentdp {

std::string to_string(SamplerMethod m) { return m == SamplerMethod::pf_ode ? "pf_ode" : "ancestral"; }

SamplerMethod parse_sampler_method(std::string_view name) {
  if (name == "pf_ode") return SamplerMethod::pf_ode;
  if (name == "ancestral") return SamplerMethod::ancestral;
  throw std::invalid_argument("unknown sampler method '" + std::string(name) + "'");
}

void SamplerConfig::validate(Eigen::Index action_dim) const {
  if (steps < 1) throw std::invalid_argument("sampler.steps must be >= 1");
  if (bounds.dim() != action_dim || bounds.hi.size() != action_dim)
    throw std::invalid_argument("sampler bounds dimension does not match the action dimension");
  if (!(bounds.lo.array() < bounds.hi.array()).all()) throw std::invalid_argument("sampler bounds need lo < hi");
}

namespace {

void check_order(double t_cur, double t_next) {
  if (t_next > t_cur) throw std::invalid_argument("reverse step requires t_next <= t_cur");
}

void check_finite(const Mat& a, int step, const char* what) {
  if (!a.allFinite()) throw SamplerError(std::string(what) + " produced a non-finite action", step);
}

}  // namespace

namespace {

// Batched reverse steps on the columns of `a`; every column shares (t_cur, t_next).
Mat pf_ode_columns(const NoiseModel& model, const Eigen::Ref<const Mat>& states, const Mat& a, double t_cur,
                   double t_next, const NoiseSchedule& schedule, int step_index) {
  check_order(t_cur, t_next);
  if (t_next == t_cur) return a;
  const auto [f, g2] = schedule.drift_diffusion(t_cur);
  const Mat eps = model.predict(a, Vec::Constant(a.cols(), t_cur), states);
  Mat next = a + (t_next - t_cur) * (f * a + (0.5 * g2 / std::sqrt(schedule.noise_var(t_cur))) * eps);
  check_finite(next, step_index, "pf_ode_step");
  return next;
}

Mat ancestral_columns(const NoiseModel& model, const Eigen::Ref<const Mat>& states, const Mat& a, double t_cur,
                      double t_next, const NoiseSchedule& schedule, const Box& bounds, Rng& rng, int step_index) {
  check_order(t_cur, t_next);
  if (t_next == t_cur) return a;
  const auto [s_cur, n_cur] = schedule.signal_and_noise_var(t_cur);
  const auto [s_next, n_next] = schedule.signal_and_noise_var(t_next);
  const Mat eps = model.predict(a, Vec::Constant(a.cols(), t_cur), states);
  Mat a0 = (a - std::sqrt(n_cur) * eps) / std::sqrt(s_cur);
  for (Eigen::Index j = 0; j < a0.cols(); ++j) a0.col(j) = bounds.clip(a0.col(j));
  const double ratio = s_cur / s_next;  // signal kept from t_next to t_cur
  const double beta_step = 1.0 - ratio;
  Mat next = (std::sqrt(s_next) * beta_step / n_cur) * a0 + (std::sqrt(ratio) * n_next / n_cur) * a;
  if (t_next > schedule.t_min()) {
    const double sd = std::sqrt(beta_step);
    for (Eigen::Index j = 0; j < next.cols(); ++j)
      for (Eigen::Index i = 0; i < next.rows(); ++i) next(i, j) += sd * rng.normal();
  }
  check_finite(next, step_index, "ancestral_step");
  return next;
}

Mat replicate_state(const Eigen::Ref<const Vec>& state, Eigen::Index n) { return state.replicate(1, n); }

}  // namespace

Vec pf_ode_step(const NoiseModel& model, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t,
                double t_cur, double t_next, const NoiseSchedule& schedule, int step_index) {
  return pf_ode_columns(model, state, Mat(a_t), t_cur, t_next, schedule, step_index).col(0);
}

Vec ancestral_step(const NoiseModel& model, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t,
                   double t_cur, double t_next, const NoiseSchedule& schedule, const Box& bounds, Rng& rng,
                   int step_index) {
  return ancestral_columns(model, state, Mat(a_t), t_cur, t_next, schedule, bounds, rng, step_index).col(0);
}

Mat sample_candidates(const NoiseModel& model, const Eigen::Ref<const Vec>& state, int M, const SamplerConfig& cfg,
                      const NoiseSchedule& schedule, Rng& rng) {
  if (M < 1) throw std::invalid_argument("sample_candidates: M must be >= 1");
  const Eigen::Index d = model.action_dim();
  cfg.validate(d);
  const auto grid = schedule.uniform_grid(cfg.steps);
  const Mat states = replicate_state(state, M);
  Mat a(d, M);
  for (int m = 0; m < M; ++m)
    for (Eigen::Index j = 0; j < d; ++j) a(j, m) = rng.normal();
  for (int i = cfg.steps; i >= 1; --i) {
    if (cfg.method == SamplerMethod::pf_ode)
      a = pf_ode_columns(model, states, a, grid[i], grid[i - 1], schedule, i);
    else
      a = ancestral_columns(model, states, a, grid[i], grid[i - 1], schedule, cfg.bounds, rng, i);
  }
  if (cfg.clip_final)
    for (int m = 0; m < M; ++m) a.col(m) = cfg.bounds.clip(a.col(m));
  return a;
}

Vec sample_action(const NoiseModel& model, const Eigen::Ref<const Vec>& state, const SamplerConfig& cfg,
                  const NoiseSchedule& schedule, Rng& rng) {
  return sample_candidates(model, state, 1, cfg, schedule, rng).col(0);
}

Selection select_action(const NoiseModel& model, const QFunction& q, const Eigen::Ref<const Vec>& state, int M,
                        const SamplerConfig& cfg, const NoiseSchedule& schedule, Rng& rng) {
  if (M < 1) throw std::invalid_argument("select_action: M must be >= 1");
  const Mat cands = sample_candidates(model, state, M, cfg, schedule, rng);
  const Vec values = q.values(state, cands);
  int best = 0;
  for (int m = 1; m < M; ++m)
    if (values[m] > values[best]) best = m;
  return {cands.col(best), values[best], best};
}

}  // namespace maxentdp

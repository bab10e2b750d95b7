#include "maxentdp/envs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace maxentdp {

namespace {

struct MixtureEval {
  double log_density;
  Vec grad;
};

// Isotropic mixture with component means `scale * mu_k` and shared variance `var`.
MixtureEval evaluate_mixture(const MixtureTarget& m, double scale, double var, const Eigen::Ref<const Vec>& x) {
  const std::size_t n = m.means.size();
  const double d = static_cast<double>(x.size());
  std::vector<double> logs(n);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    logs[k] = std::log(m.weights[k]) - 0.5 * d * std::log(2.0 * std::numbers::pi * var) -
              0.5 * (x - scale * m.means[k]).squaredNorm() / var;
    top = std::max(top, logs[k]);
  }
  double total = 0;
  Vec grad = Vec::Zero(x.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double r = std::exp(logs[k] - top);
    total += r;
    grad -= r * (x - scale * m.means[k]) / var;
  }
  return {top + std::log(total), grad / total};
}

}  // namespace

MultiGoalEnv::MultiGoalEnv(MultiGoalConfig cfg) : cfg_(cfg) {
  if (!(cfg_.goal_distance > 0) || !(cfg_.capture_radius > 0) || cfg_.horizon < 1 ||
      !(cfg_.arena_half_width > 0) || !(cfg_.reset_std >= 0) || !(cfg_.velocity_penalty >= 0))
    throw std::invalid_argument("invalid multigoal configuration");
  const double r = cfg_.goal_distance;
  for (const auto& [x, y] : {std::pair{r, 0.0}, {-r, 0.0}, {0.0, r}, {0.0, -r}}) {
    Vec g(2);
    g << x, y;
    goals_.push_back(g);
  }
}

Vec MultiGoalEnv::reset(Rng& rng) {
  for (int j = 0; j < kStateDim; ++j)
    position_[j] = std::clamp(cfg_.reset_std * rng.normal(), -cfg_.arena_half_width, cfg_.arena_half_width);
  elapsed_ = 0;
  finished_ = false;
  return position_;
}

int MultiGoalEnv::nearest_goal(const Eigen::Ref<const Vec>& position) const {
  int best = 0;
  for (int g = 1; g < static_cast<int>(goals_.size()); ++g)
    if ((position - goals_[g]).norm() < (position - goals_[best]).norm()) best = g;
  return best;
}

int MultiGoalEnv::captured_goal(const Eigen::Ref<const Vec>& position) const {
  const int g = nearest_goal(position);
  return (position - goals_[g]).norm() <= cfg_.capture_radius ? g : -1;
}

double MultiGoalEnv::reward(const Eigen::Ref<const Vec>& next_position, const Eigen::Ref<const Vec>& action) const {
  const double dist = (next_position - goals_[nearest_goal(next_position)]).norm();
  return -dist - cfg_.velocity_penalty * action.squaredNorm();
}

StepResult MultiGoalEnv::step(const Eigen::Ref<const Vec>& action) {
  if (finished_) throw std::logic_error("MultiGoalEnv::step called on a finished episode; call reset");
  if (action.size() != kActionDim) throw std::invalid_argument("MultiGoalEnv::step: action must be 2-D");
  if (!action.allFinite()) throw NumericError("MultiGoalEnv::step: non-finite action");
  StepResult res;
  const Box box = action_box();
  const Vec a = box.clip(action);
  res.action_clipped = !(a.array() == action.array()).all();
  position_ = (position_ + a).cwiseMax(-cfg_.arena_half_width).cwiseMin(cfg_.arena_half_width);
  ++elapsed_;
  res.state = position_;
  res.reward = reward(position_, a);
  res.done = captured_goal(position_) >= 0;
  res.truncated = !res.done && elapsed_ >= cfg_.horizon;
  finished_ = res.done || res.truncated;
  return res;
}

void MultiGoalEnv::restore(const Eigen::Ref<const Vec>& position, int elapsed, bool finished) {
  if (position.size() != kStateDim) throw std::invalid_argument("MultiGoalEnv::restore: bad position");
  position_ = position;
  elapsed_ = elapsed;
  finished_ = finished;
}

MixtureTarget MixtureTarget::four_modes(double offset, double std) {
  MixtureTarget m;
  for (const auto& [x, y] : {std::pair{-1.0, -1.0}, {-1.0, 1.0}, {1.0, 1.0}, {1.0, -1.0}}) {
    Vec mu(2);
    mu << x * offset, y * offset;
    m.means.push_back(mu);
    m.weights.push_back(0.25);
  }
  m.std = std;
  return m;
}

void MixtureTarget::validate() const {
  if (means.empty() || means.size() != weights.size()) throw std::invalid_argument("mixture: means/weights mismatch");
  if (!(std > 0)) throw std::invalid_argument("mixture: std must be positive");
  double total = 0;
  for (double w : weights) {
    if (!(w > 0)) throw std::invalid_argument("mixture: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture: weights must sum to 1");
}

double MixtureTarget::log_density(const Eigen::Ref<const Vec>& a) const {
  return evaluate_mixture(*this, 1.0, std * std, a).log_density;
}

Vec MixtureTarget::grad_log_density(const Eigen::Ref<const Vec>& a) const {
  return evaluate_mixture(*this, 1.0, std * std, a).grad;
}

double MixtureTarget::noised_log_density(const Eigen::Ref<const Vec>& a_t, double t,
                                         const NoiseSchedule& schedule) const {
  const auto [sig, noise] = schedule.signal_and_noise_var(t);
  return evaluate_mixture(*this, std::sqrt(sig), sig * std * std + noise, a_t).log_density;
}

Vec MixtureTarget::noised_score(const Eigen::Ref<const Vec>& a_t, double t, const NoiseSchedule& schedule) const {
  const auto [sig, noise] = schedule.signal_and_noise_var(t);
  return evaluate_mixture(*this, std::sqrt(sig), sig * std * std + noise, a_t).grad;
}

double MixtureTarget::log_candidate_partition(const Eigen::Ref<const Vec>& a_t, double t,
                                              const NoiseSchedule& schedule) const {
  const auto [sig, noise] = schedule.signal_and_noise_var(t);
  return evaluate_mixture(*this, 1.0, std * std + noise / sig, a_t / std::sqrt(sig)).log_density;
}

double mixture_logprob_oracle(const MixtureTarget& target, const Eigen::Ref<const Vec>& a0) {
  return target.log_density(a0);
}

Vec mixture_score_oracle(const MixtureTarget& target, const Eigen::Ref<const Vec>& a_t, double t,
                         const NoiseSchedule& schedule) {
  return target.noised_score(a_t, t, schedule);
}

MixtureQ::MixtureQ(MixtureTarget target, double beta) : target_(std::move(target)), beta_(beta) {
  target_.validate();
  if (!(beta_ > 0)) throw std::invalid_argument("MixtureQ: beta must be positive");
}

Vec MixtureQ::values(const Eigen::Ref<const Vec>&, const Eigen::Ref<const Mat>& actions) const {
  Vec out(actions.cols());
  for (Eigen::Index j = 0; j < actions.cols(); ++j) out[j] = beta_ * target_.log_density(actions.col(j));
  return out;
}

Mat MixtureQ::action_gradients(const Eigen::Ref<const Vec>&, const Eigen::Ref<const Mat>& actions) const {
  Mat out(actions.rows(), actions.cols());
  for (Eigen::Index j = 0; j < actions.cols(); ++j) out.col(j) = beta_ * target_.grad_log_density(actions.col(j));
  return out;
}

Mat MixtureNoiseOracle::predict(const Eigen::Ref<const Mat>& noisy, const Eigen::Ref<const Vec>& times,
                                const Eigen::Ref<const Mat>&) const {
  Mat out(noisy.rows(), noisy.cols());
  for (Eigen::Index j = 0; j < noisy.cols(); ++j)
    out.col(j) = -std::sqrt(schedule_.noise_var(times[j])) * target_.noised_score(noisy.col(j), times[j], schedule_);
  return out;
}

}  // namespace maxentdp

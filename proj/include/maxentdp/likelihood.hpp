#pragma once

#include <vector>

#include "maxentdp/models.hpp"
#include "maxentdp/rng.hpp"
#include "maxentdp/schedule.hpp"

namespace maxentdp {

struct LikelihoodConfig {
  int steps = 20;    // T
  int samples = 50;  // N per step
  void validate() const;
};

struct LogProbEstimate {
  double value = 0;                   // nats
  std::vector<double> contributions;  // w_i (d s_i - err_i), one per step
};

/// -(d / 2) log(2 pi e).
double log_prob_constant(int dim);

/// (s_prev - s_cur) / (s_cur (1 - s_cur)) for signal variances s at the two times.
double integration_weight(const NoiseSchedule& schedule, double t_prev, double t_cur);
double integration_weight_from_signal(double signal_prev, double signal_cur);

/// Mean over N fresh draws of ||eps - eps_model(sqrt(s) a0 + sqrt(1 - s) eps, t)||^2.
double noise_pred_error(const NoiseModel& model, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a0,
                        double t, int N, const NoiseSchedule& schedule, Rng& rng);

/// log p(a0 | s) by left-endpoint integration over the signal-variance grid
/// t_min = t_0 < ... < t_T = t_max. Step i draws its noise from base.stream(i),
/// so the estimate does not depend on evaluation order.
LogProbEstimate log_prob(const NoiseModel& model, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a0,
                         const LikelihoodConfig& cfg, const NoiseSchedule& schedule, const Rng& base);

/// log pi(a | s) for the Bellman target; the temperature is applied by the caller.
double entropy_term(const NoiseModel& model, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& action,
                    const LikelihoodConfig& cfg, const NoiseSchedule& schedule, const Rng& base);

}  // namespace maxentdp

#pragma once

#include <utility>
#include <vector>

#include "maxentdp/types.hpp"

namespace maxentdp {

/// Variance-preserving noise schedule with a linear beta(t).
///
/// With B(t) = integral of beta over [0, t], the signal variance is
/// sigma(alpha_t) = exp(-B(t)) and the log-SNR is alpha_t = -log(expm1(B(t))).
/// Everything is closed form so tests can compare against exact values.
class NoiseSchedule {
 public:
  struct Params {
    double beta_min = 0.1;
    double beta_max = 20.0;
    double t_min = 1e-3;
    double t_max = 0.9946;
  };

  NoiseSchedule() : NoiseSchedule(Params{}) {}
  explicit NoiseSchedule(Params p);

  [[nodiscard]] const Params& params() const { return p_; }
  [[nodiscard]] double t_min() const { return p_.t_min; }
  [[nodiscard]] double t_max() const { return p_.t_max; }

  /// beta(t); the instantaneous noise rate.
  [[nodiscard]] double beta(double t) const;
  /// Integral of beta over [0, t].
  [[nodiscard]] double integrated_beta(double t) const;

  /// alpha_t, strictly decreasing; +inf at t = 0.
  [[nodiscard]] double log_snr(double t) const;

  /// (sigma(alpha_t), sigma(-alpha_t)): signal and noise variance of the
  /// forward kernel. The pair sums to one.
  [[nodiscard]] std::pair<double, double> signal_and_noise_var(double t) const;
  [[nodiscard]] double signal_var(double t) const { return signal_and_noise_var(t).first; }
  [[nodiscard]] double noise_var(double t) const { return signal_and_noise_var(t).second; }

  /// (f(t), g^2(t)) of the probability-flow ODE; g^2 = -2 f.
  [[nodiscard]] std::pair<double, double> drift_diffusion(double t) const;

  /// sqrt(sigma(alpha_t)) a0 + sqrt(sigma(-alpha_t)) eps.
  [[nodiscard]] Vec perturb(const Eigen::Ref<const Vec>& a0, double t,
                            const Eigen::Ref<const Vec>& eps) const;

  /// T + 1 equally spaced times from t_min to t_max.
  [[nodiscard]] std::vector<double> uniform_grid(int steps) const;

 private:
  void check_time(double t) const;
  Params p_;
};

/// Logistic sigmoid, evaluated without overflow for large |x|.
double sigmoid(double x);

}  // namespace maxentdp

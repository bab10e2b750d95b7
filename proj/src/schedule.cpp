#include "maxentdp/schedule.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace maxentdp {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

NoiseSchedule::NoiseSchedule(Params p) : p_(p) {
  if (!(p_.beta_min > 0) || !(p_.beta_max > p_.beta_min))
    throw std::invalid_argument("noise schedule requires 0 < beta_min < beta_max");
  if (!(p_.t_min >= 0) || !(p_.t_min < p_.t_max) || !(p_.t_max <= 1))
    throw std::invalid_argument("noise schedule requires 0 <= t_min < t_max <= 1");
}

void NoiseSchedule::check_time(double t) const {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("diffusion time outside [0, 1]: " + std::to_string(t));
}

double NoiseSchedule::beta(double t) const {
  check_time(t);
  return p_.beta_min + t * (p_.beta_max - p_.beta_min);
}

double NoiseSchedule::integrated_beta(double t) const {
  check_time(t);
  return p_.beta_min * t + 0.5 * (p_.beta_max - p_.beta_min) * t * t;
}

double NoiseSchedule::log_snr(double t) const {
  const double b = integrated_beta(t);
  if (b == 0.0) return std::numeric_limits<double>::infinity();
  // -log(e^B - 1), split to stay accurate for large B.
  if (b > 30.0) return -b - std::log1p(-std::exp(-b));
  return -std::log(std::expm1(b));
}

std::pair<double, double> NoiseSchedule::signal_and_noise_var(double t) const {
  const double b = integrated_beta(t);
  return {std::exp(-b), -std::expm1(-b)};
}

std::pair<double, double> NoiseSchedule::drift_diffusion(double t) const {
  // log sigma(alpha_t) = -B(t), so d/dt log sigma(alpha_t) = -beta(t).
  const double b = beta(t);
  return {-0.5 * b, b};
}

Vec NoiseSchedule::perturb(const Eigen::Ref<const Vec>& a0, double t,
                           const Eigen::Ref<const Vec>& eps) const {
  if (a0.size() != eps.size())
    throw std::invalid_argument("perturb: action and noise dimensions differ");
  const auto [sig, noise] = signal_and_noise_var(t);
  return std::sqrt(sig) * a0 + std::sqrt(noise) * eps;
}

std::vector<double> NoiseSchedule::uniform_grid(int steps) const {
  if (steps < 1) throw std::invalid_argument("uniform_grid: steps must be >= 1");
  std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i)
    grid[static_cast<std::size_t>(i)] =
        p_.t_min + (static_cast<double>(i) / steps) * (p_.t_max - p_.t_min);
  grid.back() = p_.t_max;
  return grid;
}

}  // namespace maxentdp

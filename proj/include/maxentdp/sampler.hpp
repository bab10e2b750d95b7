#pragma once

#include <string>
#include <string_view>

#include "maxentdp/models.hpp"
#include "maxentdp/rng.hpp"
#include "maxentdp/schedule.hpp"

namespace maxentdp {

enum class SamplerMethod { pf_ode, ancestral };

std::string to_string(SamplerMethod m);
SamplerMethod parse_sampler_method(std::string_view name);

struct SamplerConfig {
  SamplerMethod method = SamplerMethod::pf_ode;
  int steps = 20;
  Box bounds = Box::symmetric(2, 1.0);
  bool clip_final = true;
  void validate(Eigen::Index action_dim) const;
};

/// Non-finite state during reverse integration.
class SamplerError : public NumericError {
 public:
  SamplerError(const std::string& what, int step) : NumericError(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  [[nodiscard]] int step() const { return step_; }

 private:
  int step_;
};

/// Explicit Euler step of da/dt = f(t) a + g^2(t) eps(a, t) / (2 sqrt(sigma(-alpha_t))).
Vec pf_ode_step(const NoiseModel& model, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t,
                double t_cur, double t_next, const NoiseSchedule& schedule, int step_index = -1);

/// DDPM step: predict a0, clip it to `bounds`, then draw from the Gaussian with
/// the posterior mean and variance 1 - sigma(alpha_cur) / sigma(alpha_next).
/// The step that lands on t_min adds no noise.
Vec ancestral_step(const NoiseModel& model, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t,
                   double t_cur, double t_next, const NoiseSchedule& schedule, const Box& bounds, Rng& rng,
                   int step_index = -1);

/// Draws a_T ~ N(0, I) at t_max and integrates down the uniform grid to t_min.
Vec sample_action(const NoiseModel& model, const Eigen::Ref<const Vec>& state, const SamplerConfig& cfg,
                  const NoiseSchedule& schedule, Rng& rng);

/// M draws advanced in lockstep (one batched model call per step). Column 0
/// of a single draw equals sample_action on the same stream.
Mat sample_candidates(const NoiseModel& model, const Eigen::Ref<const Vec>& state, int M, const SamplerConfig& cfg,
                      const NoiseSchedule& schedule, Rng& rng);

struct Selection {
  Vec action;
  double q = 0;
  int index = 0;
};

/// Best of M draws under Q; ties go to the lowest index. M = 1 reproduces
/// sample_action on the same stream.
Selection select_action(const NoiseModel& model, const QFunction& q, const Eigen::Ref<const Vec>& state, int M,
                        const SamplerConfig& cfg, const NoiseSchedule& schedule, Rng& rng);

}  // namespace maxentdp

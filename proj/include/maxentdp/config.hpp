#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxentdp/envs.hpp"
#include "maxentdp/likelihood.hpp"
#include "maxentdp/sac.hpp"
#include "maxentdp/sampler.hpp"
#include "maxentdp/schedule.hpp"

namespace maxentdp {

/// Invalid configuration; the message starts with the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& why) : std::runtime_error(key + ": " + why), key_(key) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ScheduleSection {
  double beta_min = 0.1;
  double beta_max = 20.0;
  double t_min = 1e-3;
  double t_max = 0.9946;
  int diffusion_steps = 20;

  [[nodiscard]] NoiseSchedule make() const { return NoiseSchedule({beta_min, beta_max, t_min, t_max}); }
  friend bool operator==(const ScheduleSection&, const ScheduleSection&) = default;
};

struct SacSection {
  double gamma = 0.99;
  double tau = 0.005;
  double beta = 0.05;
  int batch_size = 256;
  int qne_samples = 500;
  std::int64_t buffer_capacity = 1000000;
  std::int64_t total_steps = 10000;
  std::int64_t warmup_steps = 1000;
  int updates_per_step = 1;
  bool entropy_in_target = true;
  std::int64_t log_interval = 100;
  std::int64_t checkpoint_interval = 1000;
  bool parallel = true;
  /// Stop once every goal is reached by at least this fraction of evaluation
  /// rollouts (0 disables).
  double stop_at_coverage = 0.0;

  friend bool operator==(const SacSection&, const SacSection&) = default;
};

struct SamplerSection {
  std::string method = "pf_ode";
  std::optional<int> steps;  // defaults to schedule.diffusion_steps
  bool clip_final = true;

  friend bool operator==(const SamplerSection&, const SamplerSection&) = default;
};

struct EnvSection {
  std::string name = "multigoal";
  double goal_distance = 5.0;
  double velocity_penalty = 0.05;
  double capture_radius = 1.0;
  int horizon = 50;
  double arena_half_width = 7.0;
  double reset_std = 0.1;
  double mixture_offset = 0.5;
  double mixture_std = 0.1;
  double action_low = -1.0;
  double action_high = 1.0;

  [[nodiscard]] MultiGoalConfig multigoal() const {
    return {goal_distance, velocity_penalty, capture_radius, horizon, arena_half_width, reset_std};
  }
  [[nodiscard]] MixtureTarget mixture() const { return MixtureTarget::four_modes(mixture_offset, mixture_std); }
  friend bool operator==(const EnvSection&, const EnvSection&) = default;
};

struct LikelihoodSection {
  std::optional<int> steps;  // defaults to schedule.diffusion_steps
  int samples = 50;
  std::string model = "gaussian";  // gaussian | mixture | checkpoint
  std::string checkpoint;
  int grid = 41;
  double box_low = -1.0;
  double box_high = 1.0;

  friend bool operator==(const LikelihoodSection&, const LikelihoodSection&) = default;
};

struct EvalSection {
  int action_candidates = 10;
  std::int64_t interval = 1000;
  int episodes = 10;

  friend bool operator==(const EvalSection&, const EvalSection&) = default;
};

struct BenchSection {
  std::vector<std::string> estimators{"qne", "idem", "qsm"};
  std::vector<double> times{0.1, 0.5, 0.9};
  std::vector<int> samples{50, 500};
  double beta = 0.05;
  int repeats = 200;
  int points = 20;
  std::string q = "quadratic";  // quadratic | mixture
  double curvature = 25.0;
  double jitter = 0.01;

  friend bool operator==(const BenchSection&, const BenchSection&) = default;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::string out = "runs/default";
  ScheduleSection schedule;
  NetConfig net;
  SacSection sac;
  SamplerSection sampler;
  EnvSection env;
  LikelihoodSection likelihood;
  EvalSection eval;
  BenchSection bench;

  [[nodiscard]] int sampler_steps() const { return sampler.steps.value_or(schedule.diffusion_steps); }
  [[nodiscard]] int likelihood_steps() const { return likelihood.steps.value_or(schedule.diffusion_steps); }
  [[nodiscard]] Box action_box() const { return {Vec::Constant(2, env.action_low), Vec::Constant(2, env.action_high)}; }
  [[nodiscard]] SamplerConfig sampler_config() const;
  [[nodiscard]] LikelihoodConfig likelihood_config() const { return {likelihood_steps(), likelihood.samples}; }
  [[nodiscard]] EstimatorParams estimator_params() const { return {sac.qne_samples, sac.beta}; }

  /// Throws ConfigError naming the first offending key.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

}  // namespace maxentdp

#pragma once

#include <vector>

#include "maxentdp/models.hpp"
#include "maxentdp/rng.hpp"
#include "maxentdp/schedule.hpp"

namespace maxentdp {

struct MultiGoalConfig {
  double goal_distance = 5.0;
  double velocity_penalty = 0.05;
  double capture_radius = 1.0;
  int horizon = 50;
  double arena_half_width = 7.0;
  double reset_std = 0.1;
};

struct StepResult {
  Vec state;
  double reward = 0;
  bool done = false;       // goal captured; bootstrapping stops
  bool truncated = false;  // horizon reached without capture
  bool action_clipped = false;
};

/// 2-D point mass. The action is a velocity in [-1, 1]^2 and four goals sit at
/// (+-r, 0) and (0, +-r). Reward is minus the distance to the nearest goal
/// minus a quadratic velocity penalty.
class MultiGoalEnv {
 public:
  static constexpr int kStateDim = 2;
  static constexpr int kActionDim = 2;

  explicit MultiGoalEnv(MultiGoalConfig cfg = {});

  Vec reset(Rng& rng);
  StepResult step(const Eigen::Ref<const Vec>& action);

  [[nodiscard]] double reward(const Eigen::Ref<const Vec>& next_position, const Eigen::Ref<const Vec>& action) const;
  /// Index of the goal within the capture radius, or -1.
  [[nodiscard]] int captured_goal(const Eigen::Ref<const Vec>& position) const;
  [[nodiscard]] int nearest_goal(const Eigen::Ref<const Vec>& position) const;

  [[nodiscard]] const std::vector<Vec>& goals() const { return goals_; }
  [[nodiscard]] const MultiGoalConfig& config() const { return cfg_; }
  [[nodiscard]] static Box action_box() { return Box::symmetric(kActionDim, 1.0); }
  [[nodiscard]] const Vec& position() const { return position_; }
  [[nodiscard]] int elapsed() const { return elapsed_; }
  [[nodiscard]] bool finished() const { return finished_; }

  /// Puts the environment in an exact mid-episode state (checkpoint resume).
  void restore(const Eigen::Ref<const Vec>& position, int elapsed, bool finished);

 private:
  MultiGoalConfig cfg_;
  std::vector<Vec> goals_;
  Vec position_ = Vec::Zero(kStateDim);
  int elapsed_ = 0;
  bool finished_ = true;
};

/// Isotropic Gaussian mixture with a shared component std.
struct MixtureTarget {
  std::vector<Vec> means;
  std::vector<double> weights;
  double std = 0.1;

  /// Four components at (+-offset, +-offset), equal weights.
  static MixtureTarget four_modes(double offset = 0.5, double std = 0.1);

  [[nodiscard]] int dim() const { return static_cast<int>(means.front().size()); }
  [[nodiscard]] double log_density(const Eigen::Ref<const Vec>& a) const;
  [[nodiscard]] Vec grad_log_density(const Eigen::Ref<const Vec>& a) const;

  /// Log-density and score of the noised marginal at time t: components
  /// N(sqrt(s) mu_k, (s std^2 + 1 - s) I), s = sigma(alpha_t).
  [[nodiscard]] double noised_log_density(const Eigen::Ref<const Vec>& a_t, double t,
                                          const NoiseSchedule& schedule) const;
  [[nodiscard]] Vec noised_score(const Eigen::Ref<const Vec>& a_t, double t, const NoiseSchedule& schedule) const;

  /// log of E[p(a0)] with a0 ~ N(a_t / sqrt(s), (1 - s) / s I): the normalizer of
  /// the unnormalized importance-sampling estimator when exp(Q / beta) = p.
  [[nodiscard]] double log_candidate_partition(const Eigen::Ref<const Vec>& a_t, double t,
                                               const NoiseSchedule& schedule) const;

  void validate() const;
};

double mixture_logprob_oracle(const MixtureTarget& target, const Eigen::Ref<const Vec>& a0);
Vec mixture_score_oracle(const MixtureTarget& target, const Eigen::Ref<const Vec>& a_t, double t,
                         const NoiseSchedule& schedule);

/// Q(a) = beta log p(a), so exp(Q / beta) is exactly the mixture density.
class MixtureQ final : public QFunction {
 public:
  MixtureQ(MixtureTarget target, double beta);
  [[nodiscard]] Vec values(const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Mat>& actions) const override;
  [[nodiscard]] Mat action_gradients(const Eigen::Ref<const Vec>& state,
                                     const Eigen::Ref<const Mat>& actions) const override;
  [[nodiscard]] const MixtureTarget& target() const { return target_; }
  [[nodiscard]] double beta() const { return beta_; }

 private:
  MixtureTarget target_;
  double beta_;
};

/// Exact noise target for clean data drawn from a mixture.
class MixtureNoiseOracle final : public NoiseModel {
 public:
  MixtureNoiseOracle(MixtureTarget target, NoiseSchedule schedule) : target_(std::move(target)), schedule_(schedule) {}
  [[nodiscard]] int action_dim() const override { return target_.dim(); }
  [[nodiscard]] int state_dim() const override { return 0; }
  [[nodiscard]] Mat predict(const Eigen::Ref<const Mat>& noisy, const Eigen::Ref<const Vec>& times,
                            const Eigen::Ref<const Mat>& states) const override;

 private:
  MixtureTarget target_;
  NoiseSchedule schedule_;
};

}  // namespace maxentdp

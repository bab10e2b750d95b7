#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maxentdp/checkpoint.hpp"
#include "maxentdp/config.hpp"
#include "maxentdp/envs.hpp"
#include "maxentdp/sac.hpp"

namespace maxentdp {

struct MetricsRow {
  std::int64_t step = 0;
  double episode_return = 0;
  double critic_loss_1 = 0;
  double critic_loss_2 = 0;
  double actor_loss = 0;
  double mean_logpi = 0;
};

struct EvalEpisode {
  std::vector<Vec> states;  // includes the reset state
  std::vector<Vec> actions;
  std::vector<double> rewards;
  int goal = -1;  // captured goal, -1 if none
  double total_return = 0;
};

struct EvalResult {
  std::int64_t step = 0;
  std::vector<EvalEpisode> episodes;
  std::array<int, 4> goal_counts{};
  double mean_return = 0;

  /// Fraction of rollouts ending at goal g.
  [[nodiscard]] double goal_fraction(int g) const;
  /// Number of goals reached by at least `fraction` of the rollouts.
  [[nodiscard]] int goals_covered(double fraction) const;
};

std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);
std::string eval_jsonl(const std::vector<EvalResult>& evals);

/// Runs the training loop for `cfg.env.name`:
///   multigoal       soft actor-critic with the diffusion actor;
///   mixture_static  actor-only updates against the closed-form mixture Q.
/// Artifacts go to `cfg.out` when `write_artifacts` is set.
class Trainer {
 public:
  explicit Trainer(RunConfig cfg, bool write_artifacts = false);
  /// Continues from a checkpoint written by this class under the same config.
  Trainer(RunConfig cfg, const Checkpoint& ckpt, bool write_artifacts = false);

  /// Replaces the recorded metric history (rows past the resume step are dropped).
  void set_history(std::vector<MetricsRow> rows);

  /// Trains until sac.total_steps (or until stop_at_coverage is met).
  void run();
  /// Advances by exactly one iteration (env step plus updates, or one static update).
  void step();

  [[nodiscard]] EvalResult evaluate(std::int64_t step) const;
  [[nodiscard]] Checkpoint checkpoint() const;

  [[nodiscard]] const RunConfig& config() const { return cfg_; }
  [[nodiscard]] const SacAgent& agent() const { return agent_; }
  [[nodiscard]] SacAgent& agent() { return agent_; }
  [[nodiscard]] const TrainState& state() const { return state_; }
  [[nodiscard]] const std::vector<MetricsRow>& metrics() const { return metrics_; }
  [[nodiscard]] const std::vector<EvalResult>& evals() const { return evals_; }
  [[nodiscard]] std::optional<std::int64_t> coverage_step() const { return coverage_step_; }
  [[nodiscard]] bool finished() const;

  [[nodiscard]] static Rng eval_stream(std::uint64_t seed, std::int64_t step);

 private:
  [[nodiscard]] bool is_static() const { return cfg_.env.name == "mixture_static"; }
  void env_step();
  void sac_update();
  void static_update();
  void end_of_step();
  void flush_row();
  void write_metrics() const;
  void write_evals() const;
  void save(const std::string& name) const;

  RunConfig cfg_;
  bool write_artifacts_;
  NoiseSchedule schedule_;
  SamplerConfig sampler_cfg_;
  Exec exec_;
  Rng rng_;
  MultiGoalEnv env_;
  SacAgent agent_;
  TrainState state_;
  std::vector<MetricsRow> metrics_;
  std::vector<EvalResult> evals_;
  std::optional<std::int64_t> coverage_step_;
  bool stop_ = false;

  // Running sums since the last metrics row.
  int window_updates_ = 0;
  double window_c1_ = 0, window_c2_ = 0, window_actor_ = 0, window_logpi_ = 0;
  int window_logpi_count_ = 0;
  double window_target_std_ = 0;
};

}  // namespace maxentdp

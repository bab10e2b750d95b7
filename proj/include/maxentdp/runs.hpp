#pragma once

#include <optional>
#include <string>
#include <vector>

#include "maxentdp/config.hpp"
#include "maxentdp/qne.hpp"
#include "maxentdp/trainer.hpp"

namespace maxentdp {

/// Trains and writes metrics.csv, eval_trajectories.jsonl, eval.csv and
/// checkpoint_<step>.bin under cfg.out. With `resume`, continues from that
/// checkpoint and extends an existing metrics.csv.
void run_train(const RunConfig& cfg, const std::optional<std::string>& resume = std::nullopt);

/// Evaluates a checkpoint with the evaluation stream of its step; writes the
/// rollouts under cfg.out.
EvalResult run_eval(const RunConfig& cfg, const std::string& checkpoint);

struct BenchCell {
  std::string estimator;
  double t = 0;
  int K = 0;
  double beta = 0;
  std::vector<ProbePoint> points;
  std::vector<Vec> oracle;  // exact noise target per point
  EstimatorReport report;
  double mean_abs_error = 0;  // over points and coordinates
};

/// Runs every (estimator, t, K) cell of cfg.bench.
std::vector<BenchCell> bench_estimators(const RunConfig& cfg);

/// Writes bench_estimators.csv (one row per cell) and
/// bench_estimators_points.csv (one row per point and coordinate).
std::vector<BenchCell> run_bench_estimators(const RunConfig& cfg);

struct LikelihoodRow {
  double x = 0;
  double y = 0;
  double estimate = 0;
  std::optional<double> oracle;
};

/// Log-probability map over a square grid. Uses the trained actor in
/// `checkpoint` when given, otherwise the analytic model named by likelihood.model.
std::vector<LikelihoodRow> likelihood_grid(const RunConfig& cfg, const std::optional<std::string>& checkpoint);
std::vector<LikelihoodRow> run_check_likelihood(const RunConfig& cfg, const std::optional<std::string>& checkpoint);

/// Rebuilds the diffusion actor stored first in a checkpoint.
DiffusionNet actor_from_checkpoint(const Checkpoint& ckpt);

}  // namespace maxentdp

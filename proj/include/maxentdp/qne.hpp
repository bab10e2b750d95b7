#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "maxentdp/models.hpp"
#include "maxentdp/rng.hpp"
#include "maxentdp/schedule.hpp"

namespace maxentdp {

/// Standard normal conditioned on [lo, hi], by inverse CDF on the truncated range.
double sample_truncated_standard_normal(double lo, double hi, Rng& rng);
Vec sample_truncated_standard_normal(const Eigen::Ref<const Vec>& lo, const Eigen::Ref<const Vec>& hi, Rng& rng);

/// Candidate clean actions a0^i = a_t / sqrt(s) + sqrt((1 - s) / s) eps^i, s = sigma(alpha_t).
/// `q` and `weights` are filled once the candidates are scored.
struct CandidateSet {
  Mat noise;    // d x K
  Mat actions;  // d x K
  Vec q;
  Vec weights;
};

/// Draws K candidates. With bounds, each noise coordinate is truncated so the
/// candidate lands in the box; without, the noise is plain N(0, I).
CandidateSet candidate_actions(const NoiseSchedule& schedule, const Eigen::Ref<const Vec>& a_t, double t, int K,
                               const std::optional<Box>& bounds, Rng& rng);

/// Max-subtracted softmax.
Vec softmax(const Eigen::Ref<const Vec>& logits);

struct EstimatorParams {
  int K = 500;
  double beta = 0.05;
};

/// Scores the candidates with Q. Candidates with non-finite Q are redrawn
/// once; a second failure throws NumericError.
void score_candidates(const QFunction& q, const Eigen::Ref<const Vec>& state, CandidateSet& cands,
                      const NoiseSchedule& schedule, const Eigen::Ref<const Vec>& a_t, double t,
                      const std::optional<Box>& bounds, double beta, Rng& rng);

/// QNE target: eps* = -sum_i softmax(Q(a0^{1:K}) / beta)_i eps^i.
Vec qne_target(const QFunction& q, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t, double t,
               const EstimatorParams& p, const std::optional<Box>& bounds, const NoiseSchedule& schedule, Rng& rng,
               CandidateSet* diagnostics = nullptr);

/// Unnormalized importance-sampling score estimate with a known partition
/// value Z(a_t) = E[exp(Q(a0) / beta)] under the candidate proposal.
Vec is_score_estimate(const QFunction& q, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t,
                      double t, const EstimatorParams& p, double Z, const NoiseSchedule& schedule, Rng& rng);

/// Same as is_score_estimate but takes log Z, for targets where Z under- or overflows.
Vec is_score_estimate_log(const QFunction& q, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t,
                          double t, const EstimatorParams& p, double log_Z, const NoiseSchedule& schedule, Rng& rng);

/// Weighted-gradient comparator, returned in noise units.
Vec idem_target(const QFunction& q, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t, double t,
                const EstimatorParams& p, const std::optional<Box>& bounds, const NoiseSchedule& schedule, Rng& rng);

/// Direct-gradient comparator: -sqrt(sigma(-alpha_t)) grad Q(a_t) / beta.
Vec qsm_target(const QFunction& q, const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& a_t, double t,
               double beta, const NoiseSchedule& schedule);

/// Converts between noise-target units and score units.
Vec score_from_noise(const Eigen::Ref<const Vec>& eps, double t, const NoiseSchedule& schedule);
Vec noise_from_score(const Eigen::Ref<const Vec>& score, double t, const NoiseSchedule& schedule);

struct ProbePoint {
  Vec a_t;
  double t = 0.5;
};

/// One estimate at (a_t, t) with a dedicated stream.
using Estimator = std::function<Vec(const Vec& a_t, double t, Rng& rng)>;

struct EstimatorReport {
  std::string name;
  Vec mean_estimate;  // averaged over points
  Vec sample_std;     // per coordinate, averaged over points
  int K = 0;
  double beta = 0;
  std::vector<Vec> point_means;
  std::vector<Vec> point_stds;
};

/// Repeats the estimator `repeats` times per point and reports per-coordinate
/// sample standard deviations. A positive `jitter` moves each repeat's query
/// to a_t + jitter * N(0, I), which is how deterministic estimators get a spread.
EstimatorReport estimator_std(std::string name, const Estimator& estimator, std::span<const ProbePoint> points,
                              int repeats, const Rng& rng, int K = 0, double beta = 0, double jitter = 0);

struct PolicyLoss {
  double loss = 0;
  ParamSet grads;
};

/// Mean over the batch of ||eps_phi(a_t, t, s) - eps*||^2 and its parameter gradients.
PolicyLoss policy_loss_and_grad(const DiffusionNet& net, const Eigen::Ref<const Mat>& states,
                                const Eigen::Ref<const Mat>& noisy, const Eigen::Ref<const Vec>& times,
                                const Eigen::Ref<const Mat>& targets);

}  // namespace maxentdp

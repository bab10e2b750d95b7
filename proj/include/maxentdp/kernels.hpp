#pragma once

#include <optional>

#include "maxentdp/likelihood.hpp"
#include "maxentdp/qne.hpp"
#include "maxentdp/sampler.hpp"

namespace maxentdp {

/// Batch kernels. Element i always draws from base.stream(i), so the serial
/// reference and the OpenMP path return bit-identical results.
enum class Exec { serial, parallel };

/// Column i: qne_target at (states.col(i), noisy.col(i), times[i]).
Mat qne_targets(const QFunction& q, const Eigen::Ref<const Mat>& states, const Eigen::Ref<const Mat>& noisy,
                const Eigen::Ref<const Vec>& times, const EstimatorParams& p, const std::optional<Box>& bounds,
                const NoiseSchedule& schedule, const Rng& base, Exec exec);

/// Entry i: log_prob(actions.col(i) | states.col(i)).
Vec log_probs(const NoiseModel& model, const Eigen::Ref<const Mat>& states, const Eigen::Ref<const Mat>& actions,
              const LikelihoodConfig& cfg, const NoiseSchedule& schedule, const Rng& base, Exec exec);

/// Column i: sample_action for states.col(i). `count` gives the batch size
/// when the model has no state input.
Mat sample_actions(const NoiseModel& model, const Eigen::Ref<const Mat>& states, Eigen::Index count,
                   const SamplerConfig& cfg, const NoiseSchedule& schedule, const Rng& base, Exec exec);

/// Number of OpenMP threads the parallel path will use (1 without OpenMP).
int parallel_threads();

}  // namespace maxentdp

#include "maxentdp/kernels.hpp"

#include <exception>
#include <omp.h>

namespace maxentdp {

namespace {

// Runs body(i) for i in [0, n), keeping the first exception and rethrowing it
// once the loop has finished.
template <class Body>
void for_each_index(Eigen::Index n, Exec exec, Body&& body) {
  if (exec == Exec::serial) {
    for (Eigen::Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(maxentdp_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

Vec state_col(const Eigen::Ref<const Mat>& states, Eigen::Index i) {
  return states.rows() == 0 ? Vec() : Vec(states.col(i));
}

}  // namespace

int parallel_threads() { return omp_get_max_threads(); }

Mat qne_targets(const QFunction& q, const Eigen::Ref<const Mat>& states, const Eigen::Ref<const Mat>& noisy,
                const Eigen::Ref<const Vec>& times, const EstimatorParams& p, const std::optional<Box>& bounds,
                const NoiseSchedule& schedule, const Rng& base, Exec exec) {
  const Eigen::Index n = noisy.cols();
  if (times.size() != n || (states.rows() > 0 && states.cols() != n))
    throw std::invalid_argument("qne_targets: batch shape mismatch");
  Mat out(noisy.rows(), n);
  for_each_index(n, exec, [&](Eigen::Index i) {
    Rng rng = base.stream(static_cast<std::uint64_t>(i));
    out.col(i) = qne_target(q, state_col(states, i), noisy.col(i), times[i], p, bounds, schedule, rng);
  });
  return out;
}

Vec log_probs(const NoiseModel& model, const Eigen::Ref<const Mat>& states, const Eigen::Ref<const Mat>& actions,
              const LikelihoodConfig& cfg, const NoiseSchedule& schedule, const Rng& base, Exec exec) {
  const Eigen::Index n = actions.cols();
  if (states.rows() > 0 && states.cols() != n) throw std::invalid_argument("log_probs: batch shape mismatch");
  Vec out(n);
  for_each_index(n, exec, [&](Eigen::Index i) {
    out[i] = log_prob(model, state_col(states, i), actions.col(i), cfg, schedule,
                      base.stream(static_cast<std::uint64_t>(i)))
                 .value;
  });
  return out;
}

Mat sample_actions(const NoiseModel& model, const Eigen::Ref<const Mat>& states, Eigen::Index count,
                   const SamplerConfig& cfg, const NoiseSchedule& schedule, const Rng& base, Exec exec) {
  const Eigen::Index n = states.rows() > 0 ? states.cols() : count;
  Mat out(model.action_dim(), n);
  for_each_index(n, exec, [&](Eigen::Index i) {
    Rng rng = base.stream(static_cast<std::uint64_t>(i));
    out.col(i) = sample_action(model, state_col(states, i), cfg, schedule, rng);
  });
  return out;
}

}  // namespace maxentdp

#pragma once

// Small noise models with known outputs, shared by the unit tests.

#include <cmath>

#include "maxentdp/models.hpp"

namespace stub {

using maxentdp::Mat;
using maxentdp::Vec;

/// Predicts a constant value for every coordinate.
class ConstantModel final : public maxentdp::NoiseModel {
 public:
  explicit ConstantModel(int dim, double value = 0.0) : dim_(dim), value_(value) {}
  [[nodiscard]] int action_dim() const override { return dim_; }
  [[nodiscard]] int state_dim() const override { return 0; }
  [[nodiscard]] Mat predict(const Eigen::Ref<const Mat>& noisy, const Eigen::Ref<const Vec>&,
                            const Eigen::Ref<const Mat>&) const override {
    return Mat::Constant(noisy.rows(), noisy.cols(), value_);
  }

 private:
  int dim_;
  double value_;
};

/// Returns a_t / sqrt(sigma(-alpha_t)): the exact drawn noise when a0 = 0.
class EchoModel final : public maxentdp::NoiseModel {
 public:
  EchoModel(maxentdp::NoiseSchedule schedule, int dim) : schedule_(schedule), dim_(dim) {}
  [[nodiscard]] int action_dim() const override { return dim_; }
  [[nodiscard]] int state_dim() const override { return 0; }
  [[nodiscard]] Mat predict(const Eigen::Ref<const Mat>& noisy, const Eigen::Ref<const Vec>& times,
                            const Eigen::Ref<const Mat>&) const override {
    Mat out(noisy.rows(), noisy.cols());
    for (Eigen::Index j = 0; j < noisy.cols(); ++j)
      out.col(j) = noisy.col(j) / std::sqrt(schedule_.noise_var(times[j]));
    return out;
  }

 private:
  maxentdp::NoiseSchedule schedule_;
  int dim_;
};

}  // namespace stub

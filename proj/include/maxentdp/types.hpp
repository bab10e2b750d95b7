#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace maxentdp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when a computation produces NaN/Inf that must not be propagated.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned action box [lo, hi].
struct Box {
  Vec lo;
  Vec hi;

  static Box symmetric(Eigen::Index dim, double half_width) {
    return {Vec::Constant(dim, -half_width), Vec::Constant(dim, half_width)};
  }

  [[nodiscard]] Eigen::Index dim() const { return lo.size(); }

  [[nodiscard]] bool contains(const Eigen::Ref<const Vec>& a) const {
    return (a.array() >= lo.array()).all() && (a.array() <= hi.array()).all();
  }

  [[nodiscard]] Vec clip(const Eigen::Ref<const Vec>& a) const {
    return a.cwiseMax(lo).cwiseMin(hi);
  }
};

}  // namespace maxentdp

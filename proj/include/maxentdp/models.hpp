#pragma once

#include <functional>

#include "maxentdp/mlp.hpp"
#include "maxentdp/schedule.hpp"
#include "maxentdp/types.hpp"

namespace maxentdp {

/// A noise predictor eps(a_t, t, s). Batches are columns: `noisy` is d x n,
/// `times` has n entries, `states` is state_dim x n. Implementations must be
/// safe to call concurrently.
class NoiseModel {
 public:
  virtual ~NoiseModel() = default;
  [[nodiscard]] virtual int action_dim() const = 0;
  [[nodiscard]] virtual int state_dim() const = 0;
  [[nodiscard]] virtual Mat predict(const Eigen::Ref<const Mat>& noisy, const Eigen::Ref<const Vec>& times,
                                    const Eigen::Ref<const Mat>& states) const = 0;

  /// Single-point convenience wrapper.
  [[nodiscard]] Vec predict_one(const Eigen::Ref<const Vec>& noisy, double t,
                                const Eigen::Ref<const Vec>& state) const;
};

/// The diffusion policy's network: input is [a_t, time_embed(t), s].
class DiffusionNet final : public NoiseModel {
 public:
  DiffusionNet() = default;
  DiffusionNet(int action_dim, int state_dim, int hidden_layers, int hidden_units, Rng& rng);
  DiffusionNet(int action_dim, int state_dim, Mlp net);

  [[nodiscard]] int action_dim() const override { return action_dim_; }
  [[nodiscard]] int state_dim() const override { return state_dim_; }
  [[nodiscard]] Mat predict(const Eigen::Ref<const Mat>& noisy, const Eigen::Ref<const Vec>& times,
                            const Eigen::Ref<const Mat>& states) const override;

  [[nodiscard]] Mat build_input(const Eigen::Ref<const Mat>& noisy, const Eigen::Ref<const Vec>& times,
                                const Eigen::Ref<const Mat>& states) const;

  [[nodiscard]] const Mlp& mlp() const { return net_; }
  Mlp& mlp() { return net_; }

  friend bool operator==(const DiffusionNet& a, const DiffusionNet& b) {
    return a.action_dim_ == b.action_dim_ && a.state_dim_ == b.state_dim_ && a.net_ == b.net_;
  }

 private:
  int action_dim_ = 0;
  int state_dim_ = 0;
  Mlp net_;
};

/// Exact noise target when the clean data is N(0, var0 * I):
/// eps*(a_t) = sqrt(sigma(-alpha_t)) a_t / (sigma(alpha_t) var0 + sigma(-alpha_t)).
class GaussianNoiseOracle final : public NoiseModel {
 public:
  GaussianNoiseOracle(NoiseSchedule schedule, int action_dim, int state_dim = 0, double data_var = 1.0);

  [[nodiscard]] int action_dim() const override { return action_dim_; }
  [[nodiscard]] int state_dim() const override { return state_dim_; }
  [[nodiscard]] double data_var() const { return data_var_; }
  [[nodiscard]] Mat predict(const Eigen::Ref<const Mat>& noisy, const Eigen::Ref<const Vec>& times,
                            const Eigen::Ref<const Mat>& states) const override;

  /// Exact log-density of the clean data at a0.
  [[nodiscard]] double log_density(const Eigen::Ref<const Vec>& a0) const;

 private:
  NoiseSchedule schedule_;
  int action_dim_;
  int state_dim_;
  double data_var_;
};

/// A soft Q-function over (state, action). `actions` is d x K; returns K values.
class QFunction {
 public:
  virtual ~QFunction() = default;
  [[nodiscard]] virtual Vec values(const Eigen::Ref<const Vec>& state,
                                   const Eigen::Ref<const Mat>& actions) const = 0;
  /// d x K action gradients. The default uses central differences (h = 1e-5).
  [[nodiscard]] virtual Mat action_gradients(const Eigen::Ref<const Vec>& state,
                                             const Eigen::Ref<const Mat>& actions) const;

  [[nodiscard]] double value(const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& action) const;
};

/// Q(a) = -curvature * ||a - center||^2, so exp(Q/beta) is an isotropic
/// Gaussian with variance beta / (2 curvature).
class QuadraticQ final : public QFunction {
 public:
  QuadraticQ(double curvature, Vec center);
  [[nodiscard]] Vec values(const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Mat>& actions) const override;
  [[nodiscard]] Mat action_gradients(const Eigen::Ref<const Vec>& state,
                                     const Eigen::Ref<const Mat>& actions) const override;
  [[nodiscard]] double curvature() const { return curvature_; }
  [[nodiscard]] const Vec& center() const { return center_; }

 private:
  double curvature_;
  Vec center_;
};

/// Adapter for closed-form test functions; gradients fall back to finite differences.
class FunctionQ final : public QFunction {
 public:
  using Fn = std::function<double(const Vec& state, const Vec& action)>;
  explicit FunctionQ(Fn fn) : fn_(std::move(fn)) {}
  [[nodiscard]] Vec values(const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Mat>& actions) const override;

 private:
  Fn fn_;
};

}  // namespace maxentdp

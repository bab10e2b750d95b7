#include "maxentdp/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maxentdp {

Vec NoiseModel::predict_one(const Eigen::Ref<const Vec>& noisy, double t,
                            const Eigen::Ref<const Vec>& state) const {
  Vec times(1);
  times[0] = t;
  return predict(noisy, times, state);
}

DiffusionNet::DiffusionNet(int action_dim, int state_dim, int hidden_layers, int hidden_units, Rng& rng)
    : action_dim_(action_dim), state_dim_(state_dim) {
  std::vector<int> widths{action_dim + kTimeEmbedDim + state_dim};
  for (int i = 0; i < hidden_layers; ++i) widths.push_back(hidden_units);
  widths.push_back(action_dim);
  net_ = Mlp(widths, rng);
}

DiffusionNet::DiffusionNet(int action_dim, int state_dim, Mlp net)
    : action_dim_(action_dim), state_dim_(state_dim), net_(std::move(net)) {
  if (net_.input_dim() != action_dim + kTimeEmbedDim + state_dim || net_.output_dim() != action_dim)
    throw std::invalid_argument("DiffusionNet: network shape does not match action/state dimensions");
}

Mat DiffusionNet::build_input(const Eigen::Ref<const Mat>& noisy, const Eigen::Ref<const Vec>& times,
                              const Eigen::Ref<const Mat>& states) const {
  const Eigen::Index n = noisy.cols();
  if (noisy.rows() != action_dim_ || times.size() != n || states.rows() != state_dim_ ||
      (state_dim_ > 0 && states.cols() != n))
    throw std::invalid_argument("DiffusionNet: query shape mismatch");
  Mat x(action_dim_ + kTimeEmbedDim + state_dim_, n);
  x.topRows(action_dim_) = noisy;
  for (Eigen::Index j = 0; j < n; ++j) x.col(j).segment(action_dim_, kTimeEmbedDim) = time_embed(times[j]);
  if (state_dim_ > 0) x.bottomRows(state_dim_) = states;
  return x;
}

Mat DiffusionNet::predict(const Eigen::Ref<const Mat>& noisy, const Eigen::Ref<const Vec>& times,
                          const Eigen::Ref<const Mat>& states) const {
  return net_.forward(build_input(noisy, times, states));
}

GaussianNoiseOracle::GaussianNoiseOracle(NoiseSchedule schedule, int action_dim, int state_dim, double data_var)
    : schedule_(schedule), action_dim_(action_dim), state_dim_(state_dim), data_var_(data_var) {
  if (!(data_var_ > 0)) throw std::invalid_argument("GaussianNoiseOracle: data variance must be positive");
}

Mat GaussianNoiseOracle::predict(const Eigen::Ref<const Mat>& noisy, const Eigen::Ref<const Vec>& times,
                                 const Eigen::Ref<const Mat>&) const {
  if (noisy.rows() != action_dim_ || times.size() != noisy.cols())
    throw std::invalid_argument("GaussianNoiseOracle: query shape mismatch");
  Mat out(noisy.rows(), noisy.cols());
  for (Eigen::Index j = 0; j < noisy.cols(); ++j) {
    const auto [sig, noise] = schedule_.signal_and_noise_var(times[j]);
    out.col(j) = std::sqrt(noise) / (sig * data_var_ + noise) * noisy.col(j);
  }
  return out;
}

double GaussianNoiseOracle::log_density(const Eigen::Ref<const Vec>& a0) const {
  const double d = static_cast<double>(a0.size());
  return -0.5 * d * std::log(2.0 * std::numbers::pi * data_var_) - 0.5 * a0.squaredNorm() / data_var_;
}

Mat QFunction::action_gradients(const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Mat>& actions) const {
  constexpr double h = 1e-5;
  const Eigen::Index d = actions.rows();
  const Eigen::Index k = actions.cols();
  Mat grads(d, k);
  Mat probe(d, 2 * d * k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      probe.col(2 * (j * d + i)) = actions.col(j);
      probe.col(2 * (j * d + i) + 1) = actions.col(j);
      probe(i, 2 * (j * d + i)) += h;
      probe(i, 2 * (j * d + i) + 1) -= h;
    }
  const Vec q = values(state, probe);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      grads(i, j) = (q[2 * (j * d + i)] - q[2 * (j * d + i) + 1]) / (2.0 * h);
  return grads;
}

double QFunction::value(const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Vec>& action) const {
  return values(state, action)[0];
}

QuadraticQ::QuadraticQ(double curvature, Vec center) : curvature_(curvature), center_(std::move(center)) {}

Vec QuadraticQ::values(const Eigen::Ref<const Vec>&, const Eigen::Ref<const Mat>& actions) const {
  return -curvature_ * (actions.colwise() - center_).colwise().squaredNorm().transpose();
}

Mat QuadraticQ::action_gradients(const Eigen::Ref<const Vec>&, const Eigen::Ref<const Mat>& actions) const {
  return -2.0 * curvature_ * (actions.colwise() - center_);
}

Vec FunctionQ::values(const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Mat>& actions) const {
  Vec out(actions.cols());
  const Vec s = state;
  for (Eigen::Index j = 0; j < actions.cols(); ++j) out[j] = fn_(s, actions.col(j));
  return out;
}

}  // namespace maxentdp

#include "maxentdp/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace maxentdp {

namespace {

// tanh(softplus(x)) = n / (n + 2) with n = e^x (e^x + 2), which needs a
// single exp. Clamping the exponent at 20 is exact: there n / (n + 2) rounds
// to 1, so mish(x) = x and mish'(x) = 1 without a branch.
constexpr double kMishCutoff = 20.0;

Mat mish_array(const Mat& z) {
  Eigen::ArrayXXd n = z.array().min(kMishCutoff).exp();
  n = n * (n + 2.0);
  return z.array() * n / (n + 2.0);
}

Mat mish_grad_array(const Mat& z) {
  const Eigen::ArrayXXd e = z.array().min(kMishCutoff).exp();
  const Eigen::ArrayXXd n = e * (e + 2.0);
  const Eigen::ArrayXXd tsp = n / (n + 2.0);
  return tsp + z.array() * (1.0 - tsp * tsp) * e / (1.0 + e);
}

void check_shapes(const ParamSet& a, const ParamSet& b, const char* what) {
  bool ok = a.size() == b.size();
  for (std::size_t i = 0; ok && i < a.size(); ++i)
    ok = a[i].weight.rows() == b[i].weight.rows() && a[i].weight.cols() == b[i].weight.cols() &&
         a[i].bias.size() == b[i].bias.size();
  if (!ok) throw std::invalid_argument(std::string(what) + ": parameter shape mismatch");
}

}  // namespace

double mish(double x) {
  const double e = std::exp(std::min(x, kMishCutoff));
  const double n = e * (e + 2.0);
  return x * n / (n + 2.0);
}

double mish_grad(double x) {
  const double e = std::exp(std::min(x, kMishCutoff));
  const double n = e * (e + 2.0);
  const double tsp = n / (n + 2.0);
  return tsp + x * (1.0 - tsp * tsp) * e / (1.0 + e);
}

ParamSet zeros_like(const ParamSet& p) {
  ParamSet z;
  z.reserve(p.size());
  for (const auto& l : p)
    z.push_back({Mat::Zero(l.weight.rows(), l.weight.cols()), Vec::Zero(l.bias.size())});
  return z;
}

Mlp::Mlp(std::vector<int> widths, Rng& rng) {
  if (widths.size() < 2) throw std::invalid_argument("Mlp needs at least input and output widths");
  for (int w : widths)
    if (w <= 0) throw std::invalid_argument("Mlp widths must be positive");
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const int in = widths[i];
    const int out = widths[i + 1];
    const double bound = std::sqrt(6.0 / in);
    DenseLayer layer{Mat(out, in), Vec::Zero(out)};
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    layers_.push_back(std::move(layer));
  }
}

Mlp::Mlp(ParamSet layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("Mlp needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].weight.rows() != layers_[i].bias.size())
      throw std::invalid_argument("Mlp layer bias does not match weight rows");
    if (i > 0 && layers_[i].weight.cols() != layers_[i - 1].weight.rows())
      throw std::invalid_argument("Mlp consecutive layer dimensions incompatible");
  }
}

int Mlp::input_dim() const { return static_cast<int>(layers_.front().weight.cols()); }
int Mlp::output_dim() const { return static_cast<int>(layers_.back().weight.rows()); }

std::vector<int> Mlp::widths() const {
  std::vector<int> w{input_dim()};
  for (const auto& l : layers_) w.push_back(static_cast<int>(l.weight.rows()));
  return w;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Mat Mlp::forward(const Eigen::Ref<const Mat>& x) const {
  if (x.rows() != input_dim()) throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  Mat h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Mat z = layers_[i].weight * h;
    z.colwise() += layers_[i].bias;
    if (i + 1 < layers_.size()) z = mish_array(z);
    h = std::move(z);
  }
  return h;
}

Mat Mlp::forward(const Eigen::Ref<const Mat>& x, Tape& tape) const {
  if (x.rows() != input_dim()) throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  tape.owner = this;
  tape.version = version_;
  tape.inputs.clear();
  tape.preactivations.clear();
  Mat h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Mat z = layers_[i].weight * h;
    z.colwise() += layers_[i].bias;
    tape.inputs.push_back(std::move(h));
    if (i + 1 < layers_.size()) {
      h = mish_array(z);
      tape.preactivations.push_back(std::move(z));
    } else {
      tape.preactivations.push_back(z);
      h = std::move(z);
    }
  }
  return h;
}

Backprop Mlp::backward(const Tape& tape, const Eigen::Ref<const Mat>& dy) const {
  if (tape.owner != this || tape.version != version_ || tape.inputs.size() != layers_.size())
    throw StaleTapeError("Mlp::backward: tape does not belong to the current parameters");
  if (dy.rows() != output_dim() || dy.cols() != tape.inputs.front().cols())
    throw std::invalid_argument("Mlp::backward: output gradient shape mismatch");

  Backprop out;
  out.grads.resize(layers_.size());
  Mat delta = dy;  // gradient w.r.t. pre-activation of the current layer
  for (std::size_t k = layers_.size(); k-- > 0;) {
    if (k + 1 < layers_.size()) {
      delta = delta.cwiseProduct(mish_grad_array(tape.preactivations[k]));
    }
    out.grads[k].weight = delta * tape.inputs[k].transpose();
    out.grads[k].bias = delta.rowwise().sum();
    delta = layers_[k].weight.transpose() * delta;
  }
  out.input_grad = std::move(delta);
  return out;
}

Adam::Adam(const Mlp& net, AdamConfig cfg)
    : cfg_(cfg), m_(zeros_like(net.params())), v_(zeros_like(net.params())) {}

Adam Adam::restore(AdamConfig cfg, std::uint64_t steps, ParamSet m, ParamSet v) {
  check_shapes(m, v, "Adam::restore");
  Adam a;
  a.cfg_ = cfg;
  a.t_ = steps;
  a.m_ = std::move(m);
  a.v_ = std::move(v);
  return a;
}

void Adam::step(Mlp& net, const ParamSet& grads) {
  check_shapes(net.params(), grads, "Adam::step");
  check_shapes(m_, grads, "Adam::step");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  auto& params = net.mutable_params();
  auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    p.array() -= cfg_.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg_.eps);
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    update(params[i].weight, m_[i].weight, v_[i].weight, grads[i].weight);
    update(params[i].bias, m_[i].bias, v_[i].bias, grads[i].bias);
  }
}

void polyak_update(Mlp& target, const Mlp& source, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("polyak_update: tau must lie in (0, 1]");
  check_shapes(target.params(), source.params(), "polyak_update");
  auto& tp = target.mutable_params();
  const auto& sp = source.params();
  for (std::size_t i = 0; i < tp.size(); ++i) {
    tp[i].weight = tau * sp[i].weight + (1.0 - tau) * tp[i].weight;
    tp[i].bias = tau * sp[i].bias + (1.0 - tau) * tp[i].bias;
  }
}

Vec time_embed(double t) {
  Vec e(kTimeEmbedDim);
  constexpr int half = kTimeEmbedDim / 2;
  for (int k = 0; k < half; ++k) {
    const double freq = std::exp(std::log(1000.0) * k / (half - 1));
    e[2 * k] = std::sin(freq * t);
    e[2 * k + 1] = std::cos(freq * t);
  }
  return e;
}

}  // namespace maxentdp

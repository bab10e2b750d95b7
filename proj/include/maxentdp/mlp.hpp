#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "maxentdp/rng.hpp"
#include "maxentdp/types.hpp"

namespace maxentdp {

/// Thrown when a tape is replayed against parameters it was not recorded on.
class StaleTapeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

double mish(double x);
double mish_grad(double x);

struct DenseLayer {
  Mat weight;  // out x in
  Vec bias;    // out

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weight == b.weight && a.bias == b.bias;
  }
};

/// Parameters (or gradients, or optimizer moments) of an Mlp, layer by layer.
using ParamSet = std::vector<DenseLayer>;

ParamSet zeros_like(const ParamSet& p);

class Mlp;

/// Forward intermediates of one batched pass; consumed by Mlp::backward.
struct Tape {
  const Mlp* owner = nullptr;
  std::uint64_t version = 0;
  std::vector<Mat> inputs;       // input to each layer
  std::vector<Mat> preactivations;
};

struct Backprop {
  ParamSet grads;
  Mat input_grad;  // in x batch
};

/// Dense perceptron, mish on hidden layers and identity on the output.
/// Batches are columns: forward maps (in x n) to (out x n).
class Mlp {
 public:
  Mlp() = default;
  /// He-uniform initialization, zero biases.
  Mlp(std::vector<int> widths, Rng& rng);
  /// Wrap existing parameters (used by checkpoint loading and tests).
  explicit Mlp(ParamSet layers);

  [[nodiscard]] int input_dim() const;
  [[nodiscard]] int output_dim() const;
  [[nodiscard]] std::vector<int> widths() const;
  [[nodiscard]] std::size_t parameter_count() const;

  [[nodiscard]] Mat forward(const Eigen::Ref<const Mat>& x) const;
  [[nodiscard]] Mat forward(const Eigen::Ref<const Mat>& x, Tape& tape) const;

  /// Reverse pass for output gradient `dy` (out x n). Parameter gradients are
  /// summed over the batch.
  [[nodiscard]] Backprop backward(const Tape& tape, const Eigen::Ref<const Mat>& dy) const;

  [[nodiscard]] const ParamSet& params() const { return layers_; }
  /// Mutable access invalidates outstanding tapes.
  ParamSet& mutable_params() {
    ++version_;
    return layers_;
  }

  friend bool operator==(const Mlp& a, const Mlp& b) { return a.layers_ == b.layers_; }

 private:
  ParamSet layers_;
  std::uint64_t version_ = 0;
};

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

class Adam {
 public:
  Adam() = default;
  Adam(const Mlp& net, AdamConfig cfg);

  void step(Mlp& net, const ParamSet& grads);

  [[nodiscard]] const AdamConfig& config() const { return cfg_; }
  [[nodiscard]] std::uint64_t steps() const { return t_; }
  [[nodiscard]] const ParamSet& first_moment() const { return m_; }
  [[nodiscard]] const ParamSet& second_moment() const { return v_; }

  static Adam restore(AdamConfig cfg, std::uint64_t steps, ParamSet m, ParamSet v);

  friend bool operator==(const Adam& a, const Adam& b) {
    return a.cfg_ == b.cfg_ && a.t_ == b.t_ && a.m_ == b.m_ && a.v_ == b.v_;
  }

 private:
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
  ParamSet m_;
  ParamSet v_;
};

/// Polyak averaging: target <- tau * source + (1 - tau) * target.
void polyak_update(Mlp& target, const Mlp& source, double tau);

inline constexpr int kTimeEmbedDim = 16;

/// Sinusoidal features of diffusion time, frequencies log-spaced in [1, 1000].
Vec time_embed(double t);

}  // namespace maxentdp

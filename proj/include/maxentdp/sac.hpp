#pragma once

#include <cstdint>
#include <vector>

#include "maxentdp/kernels.hpp"
#include "maxentdp/mlp.hpp"
#include "maxentdp/models.hpp"

namespace maxentdp {

struct Transition {
  Vec s;
  Vec a;
  double r = 0;
  Vec s_next;
  bool done = false;  // true termination only, never a time-limit cut
};

struct Batch {
  Mat s;       // state_dim x B
  Mat a;       // action_dim x B
  Vec r;       // B
  Mat s_next;  // state_dim x B
  Vec done;    // 0 or 1
  std::vector<std::size_t> indices;
};

/// Ring buffer of transitions with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  ReplayBuffer() = default;
  ReplayBuffer(std::size_t capacity, int state_dim, int action_dim);

  void push(const Transition& tr);
  [[nodiscard]] Batch sample(std::size_t batch_size, Rng& rng) const;
  [[nodiscard]] Batch gather(const std::vector<std::size_t>& indices) const;
  [[nodiscard]] Transition at(std::size_t index) const;

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }
  [[nodiscard]] std::size_t cursor() const { return cursor_; }
  [[nodiscard]] int state_dim() const { return state_dim_; }
  [[nodiscard]] int action_dim() const { return action_dim_; }

  /// Raw storage, one row of (s, a, r, s_next, done) per stored item.
  [[nodiscard]] const std::vector<double>& storage() const { return data_; }
  static ReplayBuffer restore(std::size_t capacity, int state_dim, int action_dim, std::size_t size,
                              std::size_t cursor, std::vector<double> data);

  friend bool operator==(const ReplayBuffer&, const ReplayBuffer&) = default;

 private:
  [[nodiscard]] std::size_t stride() const { return 2 * static_cast<std::size_t>(state_dim_) + action_dim_ + 2; }

  std::size_t capacity_ = 0;
  int state_dim_ = 0;
  int action_dim_ = 0;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;
  std::vector<double> data_;
};

/// Critic input is [s; a]; output is a scalar per column.
Mlp make_critic(int state_dim, int action_dim, int hidden_layers, int hidden_units, Rng& rng);
Vec critic_values(const Mlp& critic, const Eigen::Ref<const Mat>& states, const Eigen::Ref<const Mat>& actions);

/// min(Q1, Q2) as a QFunction; gradients come from whichever critic is smaller.
class CriticMinQ final : public QFunction {
 public:
  CriticMinQ(const Mlp& q1, const Mlp& q2) : q1_(q1), q2_(q2) {}
  [[nodiscard]] Vec values(const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Mat>& actions) const override;
  [[nodiscard]] Mat action_gradients(const Eigen::Ref<const Vec>& state,
                                     const Eigen::Ref<const Mat>& actions) const override;

 private:
  const Mlp& q1_;
  const Mlp& q2_;
};

struct NetConfig {
  int hidden_layers = 2;
  int hidden_units = 256;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

/// Diffusion actor, twin critics, their target copies and the optimizers.
struct SacAgent {
  DiffusionNet actor;
  Mlp q1, q2, q1_target, q2_target;
  Adam actor_opt, q1_opt, q2_opt;

  SacAgent() = default;
  SacAgent(int state_dim, int action_dim, const NetConfig& cfg, Rng& rng);

  friend bool operator==(const SacAgent&, const SacAgent&) = default;
};

/// r + (1 - done) gamma (min(Q1'(s', a'), Q2'(s', a')) - beta log pi(a' | s')).
/// Terminal items never read the next-state values. `next_q1`, `next_q2` and
/// `next_logpi` are per item.
Vec bellman_targets(const Eigen::Ref<const Vec>& rewards, const Eigen::Ref<const Vec>& done,
                    const Eigen::Ref<const Vec>& next_q1, const Eigen::Ref<const Vec>& next_q2,
                    const Eigen::Ref<const Vec>& next_logpi, double beta, double gamma);

/// One Adam step on mean (Q(s, a) - y)^2; returns the loss before the step.
double critic_update(Mlp& critic, Adam& opt, const Eigen::Ref<const Mat>& states, const Eigen::Ref<const Mat>& actions,
                     const Eigen::Ref<const Vec>& targets);

struct ActorUpdateStats {
  double loss = 0;
  double target_std = 0;  // std of eps* entries over the batch
};

/// Draws t ~ U[t_min, t_max] and a_t around each batch action, builds QNE
/// targets under `q`, and takes one Adam step on the noise-regression loss.
ActorUpdateStats actor_update(DiffusionNet& actor, Adam& opt, const QFunction& q, const Eigen::Ref<const Mat>& states,
                              const Eigen::Ref<const Mat>& actions, const EstimatorParams& p, const Box& bounds,
                              const NoiseSchedule& schedule, const Rng& rng, Exec exec);

/// Polyak update of both target critics.
void soft_update(SacAgent& agent, double tau);

}  // namespace maxentdp

#include "maxentdp/sac.hpp"

#include <cmath>
#include <stdexcept>

namespace maxentdp {

Mlp make_critic(int state_dim, int action_dim, int hidden_layers, int hidden_units, Rng& rng) {
  std::vector<int> widths{state_dim + action_dim};
  for (int i = 0; i < hidden_layers; ++i) widths.push_back(hidden_units);
  widths.push_back(1);
  return Mlp(widths, rng);
}

namespace {

Mat critic_input(const Eigen::Ref<const Mat>& states, const Eigen::Ref<const Mat>& actions) {
  if (states.rows() > 0 && states.cols() != actions.cols())
    throw std::invalid_argument("critic input: state and action batch sizes differ");
  Mat x(states.rows() + actions.rows(), actions.cols());
  if (states.rows() > 0) x.topRows(states.rows()) = states;
  x.bottomRows(actions.rows()) = actions;
  return x;
}

}  // namespace

Vec critic_values(const Mlp& critic, const Eigen::Ref<const Mat>& states, const Eigen::Ref<const Mat>& actions) {
  return critic.forward(critic_input(states, actions)).row(0).transpose();
}

Vec CriticMinQ::values(const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Mat>& actions) const {
  const Mat states = state.replicate(1, actions.cols());
  return critic_values(q1_, states, actions).cwiseMin(critic_values(q2_, states, actions));
}

Mat CriticMinQ::action_gradients(const Eigen::Ref<const Vec>& state, const Eigen::Ref<const Mat>& actions) const {
  const Mat x = critic_input(state.replicate(1, actions.cols()), actions);
  Tape t1, t2;
  const Mat v1 = q1_.forward(x, t1);
  const Mat v2 = q2_.forward(x, t2);
  Mat d1 = Mat::Zero(1, actions.cols());
  Mat d2 = Mat::Zero(1, actions.cols());
  for (Eigen::Index j = 0; j < actions.cols(); ++j) (v1(0, j) <= v2(0, j) ? d1 : d2)(0, j) = 1.0;
  const Mat g = q1_.backward(t1, d1).input_grad + q2_.backward(t2, d2).input_grad;
  return g.bottomRows(actions.rows());
}

SacAgent::SacAgent(int state_dim, int action_dim, const NetConfig& cfg, Rng& rng) {
  Rng actor_rng = rng.split("actor_init");
  Rng critic_rng = rng.split("critic_init");
  actor = DiffusionNet(action_dim, state_dim, cfg.hidden_layers, cfg.hidden_units, actor_rng);
  q1 = make_critic(state_dim, action_dim, cfg.hidden_layers, cfg.hidden_units, critic_rng);
  q2 = make_critic(state_dim, action_dim, cfg.hidden_layers, cfg.hidden_units, critic_rng);
  q1_target = q1;
  q2_target = q2;
  actor_opt = Adam(actor.mlp(), {cfg.actor_lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps});
  q1_opt = Adam(q1, {cfg.critic_lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps});
  q2_opt = Adam(q2, {cfg.critic_lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps});
}

Vec bellman_targets(const Eigen::Ref<const Vec>& rewards, const Eigen::Ref<const Vec>& done,
                    const Eigen::Ref<const Vec>& next_q1, const Eigen::Ref<const Vec>& next_q2,
                    const Eigen::Ref<const Vec>& next_logpi, double beta, double gamma) {
  const Eigen::Index n = rewards.size();
  if (done.size() != n || next_q1.size() != n || next_q2.size() != n || next_logpi.size() != n)
    throw std::invalid_argument("bellman_targets: batch size mismatch");
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (done[i] != 0.0) {
      y[i] = rewards[i];
      continue;
    }
    const double entropy = beta == 0.0 ? 0.0 : beta * next_logpi[i];
    if (!std::isfinite(entropy))
      throw NumericError("non-finite log pi in Bellman target (item " + std::to_string(i) +
                         ", log pi = " + std::to_string(next_logpi[i]) + ")");
    y[i] = rewards[i] + gamma * (std::min(next_q1[i], next_q2[i]) - entropy);
  }
  return y;
}

double critic_update(Mlp& critic, Adam& opt, const Eigen::Ref<const Mat>& states, const Eigen::Ref<const Mat>& actions,
                     const Eigen::Ref<const Vec>& targets) {
  if (targets.size() != actions.cols() || actions.cols() == 0)
    throw std::invalid_argument("critic_update: batch size mismatch");
  Tape tape;
  const Mat q = critic.forward(critic_input(states, actions), tape);
  const Mat diff = q - targets.transpose();
  const double n = static_cast<double>(targets.size());
  const double loss = diff.squaredNorm() / n;
  const auto grads = critic.backward(tape, (2.0 / n) * diff).grads;
  opt.step(critic, grads);
  return loss;
}

ActorUpdateStats actor_update(DiffusionNet& actor, Adam& opt, const QFunction& q, const Eigen::Ref<const Mat>& states,
                              const Eigen::Ref<const Mat>& actions, const EstimatorParams& p, const Box& bounds,
                              const NoiseSchedule& schedule, const Rng& rng, Exec exec) {
  const Eigen::Index n = actions.cols();
  Rng draws = rng.split("diffusion_time");
  Vec times(n);
  Mat noisy(actions.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    times[i] = draws.uniform(schedule.t_min(), schedule.t_max());
    Vec eps(actions.rows());
    for (Eigen::Index j = 0; j < eps.size(); ++j) eps[j] = draws.normal();
    noisy.col(i) = schedule.perturb(actions.col(i), times[i], eps);
  }
  const Mat targets = qne_targets(q, states, noisy, times, p, bounds, schedule, rng.split("qne"), exec);
  const PolicyLoss pl = policy_loss_and_grad(actor, states, noisy, times, targets);
  if (!std::isfinite(pl.loss)) throw NumericError("non-finite actor loss");
  opt.step(actor.mlp(), pl.grads);
  const double mean = targets.mean();
  const double var = (targets.array() - mean).square().sum() / std::max<Eigen::Index>(1, targets.size() - 1);
  return {pl.loss, std::sqrt(var)};
}

void soft_update(SacAgent& agent, double tau) {
  polyak_update(agent.q1_target, agent.q1, tau);
  polyak_update(agent.q2_target, agent.q2, tau);
}

}  // namespace maxentdp

#include "maxentdp/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>
#include <sstream>

namespace maxentdp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

Vec uniform_in(const Box& box, Rng& rng) {
  Vec a(box.dim());
  for (Eigen::Index j = 0; j < a.size(); ++j) a[j] = rng.uniform(box.lo[j], box.hi[j]);
  return a;
}

}  // namespace

double EvalResult::goal_fraction(int g) const {
  if (episodes.empty()) return 0.0;
  return static_cast<double>(goal_counts.at(static_cast<std::size_t>(g))) / static_cast<double>(episodes.size());
}

int EvalResult::goals_covered(double fraction) const {
  int n = 0;
  for (int g = 0; g < 4; ++g)
    if (goal_counts[static_cast<std::size_t>(g)] > 0 && goal_fraction(g) >= fraction) ++n;
  return n;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "step,episode_return,critic_loss_1,critic_loss_2,actor_loss,mean_logpi\n";
  for (const auto& r : rows)
    out += std::to_string(r.step) + "," + format_double(r.episode_return) + "," + format_double(r.critic_loss_1) +
           "," + format_double(r.critic_loss_2) + "," + format_double(r.actor_loss) + "," +
           format_double(r.mean_logpi) + "\n";
  return out;
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
  std::vector<MetricsRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw std::runtime_error("metrics.csv: malformed row '" + line + "'");
    MetricsRow r;
    r.step = std::stoll(cells[0]);
    double* fields[] = {&r.episode_return, &r.critic_loss_1, &r.critic_loss_2, &r.actor_loss, &r.mean_logpi};
    for (int i = 0; i < 5; ++i) *fields[i] = std::strtod(cells[static_cast<std::size_t>(i + 1)].c_str(), nullptr);
    rows.push_back(r);
  }
  return rows;
}

std::string eval_jsonl(const std::vector<EvalResult>& evals) {
  auto vec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  std::string out;
  for (const auto& ev : evals) {
    for (std::size_t e = 0; e < ev.episodes.size(); ++e) {
      const auto& ep = ev.episodes[e];
      nlohmann::json j;
      j["step"] = ev.step;
      j["episode"] = e;
      j["goal"] = ep.goal;
      j["return"] = ep.total_return;
      j["states"] = nlohmann::json::array();
      for (const auto& s : ep.states) j["states"].push_back(vec(s));
      j["actions"] = nlohmann::json::array();
      for (const auto& a : ep.actions) j["actions"].push_back(vec(a));
      j["rewards"] = ep.rewards;
      out += j.dump() + "\n";
    }
  }
  return out;
}

Trainer::Trainer(RunConfig cfg, bool write_artifacts)
    : cfg_(std::move(cfg)),
      write_artifacts_(write_artifacts),
      schedule_((cfg_.validate(), cfg_.schedule.make())),
      sampler_cfg_(cfg_.sampler_config()),
      exec_(cfg_.sac.parallel ? Exec::parallel : Exec::serial),
      rng_(cfg_.seed),
      env_(cfg_.env.multigoal()) {
  Rng init = rng_.split("init");
  if (is_static()) {
    Rng actor_rng = init.split("actor_init");
    agent_.actor = DiffusionNet(2, 0, cfg_.net.hidden_layers, cfg_.net.hidden_units, actor_rng);
    agent_.actor_opt =
        Adam(agent_.actor.mlp(), {cfg_.net.actor_lr, cfg_.net.adam_beta1, cfg_.net.adam_beta2, cfg_.net.adam_eps});
    return;
  }
  agent_ = SacAgent(MultiGoalEnv::kStateDim, MultiGoalEnv::kActionDim, cfg_.net, init);
  state_.buffer = ReplayBuffer(static_cast<std::size_t>(cfg_.sac.buffer_capacity), MultiGoalEnv::kStateDim,
                               MultiGoalEnv::kActionDim);
  Rng reset_rng = rng_.split("reset").stream(0);
  env_.reset(reset_rng);
  state_.finished = false;
}

Trainer::Trainer(RunConfig cfg, const Checkpoint& ckpt, bool write_artifacts)
    : Trainer(std::move(cfg), write_artifacts) {
  if (!ckpt.train) throw CheckpointError("checkpoint has no training state to resume from");
  const std::size_t expected = is_static() ? 1 : 5;
  if (ckpt.networks.size() != expected) throw CheckpointError("checkpoint network count does not match env.name");
  auto load = [](Mlp& dst, const NetworkEntry& src, Adam* opt) {
    if (dst.widths() != src.net.widths()) throw CheckpointError("checkpoint network shape does not match config");
    dst = src.net;
    if (opt) {
      if (!src.adam) throw CheckpointError("checkpoint lacks optimizer state");
      *opt = *src.adam;
    }
  };
  load(agent_.actor.mlp(), ckpt.networks[0], &agent_.actor_opt);
  if (!is_static()) {
    load(agent_.q1, ckpt.networks[1], &agent_.q1_opt);
    load(agent_.q2, ckpt.networks[2], &agent_.q2_opt);
    load(agent_.q1_target, ckpt.networks[3], nullptr);
    load(agent_.q2_target, ckpt.networks[4], nullptr);
  }
  state_ = *ckpt.train;
  if (!is_static()) {
    if (!state_.buffer) throw CheckpointError("checkpoint lacks the replay buffer");
    env_.restore(state_.position, static_cast<int>(state_.elapsed), state_.finished);
  }
}

Rng Trainer::eval_stream(std::uint64_t seed, std::int64_t step) {
  return Rng(seed).split("eval").stream(static_cast<std::uint64_t>(step));
}

void Trainer::set_history(std::vector<MetricsRow> rows) {
  std::erase_if(rows, [&](const MetricsRow& r) { return r.step > static_cast<std::int64_t>(state_.env_steps); });
  metrics_ = std::move(rows);
}

bool Trainer::finished() const {
  return stop_ || state_.env_steps >= static_cast<std::uint64_t>(cfg_.sac.total_steps);
}

void Trainer::run() {
  while (!finished()) step();
  if (state_.env_steps > 0 &&
      (metrics_.empty() || metrics_.back().step < static_cast<std::int64_t>(state_.env_steps)))
    flush_row();
  if (write_artifacts_) {
    write_metrics();
    save("checkpoint_" + std::to_string(state_.env_steps) + ".bin");
  }
}

void Trainer::step() {
  try {
    if (is_static()) {
      static_update();
    } else {
      env_step();
      if (state_.env_steps > static_cast<std::uint64_t>(cfg_.sac.warmup_steps))
        for (int u = 0; u < cfg_.sac.updates_per_step; ++u) sac_update();
    }
    end_of_step();
  } catch (const NumericError& e) {
    spdlog::error("training aborted at step {}: {}", state_.env_steps, e.what());
    if (write_artifacts_) {
      save("checkpoint_" + std::to_string(state_.env_steps) + "_abort.bin");
      write_metrics();
    }
    throw;
  }
}

void Trainer::env_step() {
  const std::uint64_t step = ++state_.env_steps;
  Rng explore = rng_.split("explore").stream(step);
  const Vec s = env_.position();
  const Box box = cfg_.action_box();
  Vec a;
  if (step <= static_cast<std::uint64_t>(cfg_.sac.warmup_steps))
    a = uniform_in(box, explore);
  else
    a = sample_action(agent_.actor, s, sampler_cfg_, schedule_, explore);
  a = box.clip(a);
  const StepResult res = env_.step(a);
  state_.buffer->push({s, a, res.reward, res.state, res.done});
  state_.episode_return += res.reward;
  if (res.done || res.truncated) {
    state_.last_return = state_.episode_return;
    state_.episode_return = 0;
    ++state_.episodes;
    Rng reset_rng = rng_.split("reset").stream(state_.episodes);
    env_.reset(reset_rng);
  }
  state_.position = env_.position();
  state_.elapsed = env_.elapsed();
  state_.finished = env_.finished();
}

void Trainer::sac_update() {
  const std::uint64_t u = state_.updates++;
  const Rng ur = rng_.split("update").stream(u);
  Rng replay_rng = ur.split("replay");
  const auto B = static_cast<std::size_t>(cfg_.sac.batch_size);
  const Batch b = state_.buffer->sample(B, replay_rng);

  const Mat next_a = sample_actions(agent_.actor, b.s_next, b.s_next.cols(), sampler_cfg_, schedule_,
                                    ur.split("target_action"), exec_);
  const double beta_target = cfg_.sac.entropy_in_target ? cfg_.sac.beta : 0.0;
  Vec logpi = Vec::Zero(next_a.cols());
  if (beta_target > 0) {
    logpi = log_probs(agent_.actor, b.s_next, next_a, cfg_.likelihood_config(), schedule_, ur.split("likelihood"),
                      exec_);
    for (Eigen::Index i = 0; i < logpi.size(); ++i)
      if (b.done[i] == 0.0) {
        window_logpi_ += logpi[i];
        ++window_logpi_count_;
      }
  }
  const Vec q1n = critic_values(agent_.q1_target, b.s_next, next_a);
  const Vec q2n = critic_values(agent_.q2_target, b.s_next, next_a);
  const Vec y = bellman_targets(b.r, b.done, q1n, q2n, logpi, beta_target, cfg_.sac.gamma);

  const double l1 = critic_update(agent_.q1, agent_.q1_opt, b.s, b.a, y);
  const double l2 = critic_update(agent_.q2, agent_.q2_opt, b.s, b.a, y);
  if (!std::isfinite(l1) || !std::isfinite(l2)) throw NumericError("non-finite critic loss");

  const CriticMinQ q(agent_.q1, agent_.q2);
  const ActorUpdateStats st = actor_update(agent_.actor, agent_.actor_opt, q, b.s, b.a, cfg_.estimator_params(),
                                           cfg_.action_box(), schedule_, ur.split("actor"), exec_);
  soft_update(agent_, cfg_.sac.tau);

  ++window_updates_;
  window_c1_ += l1;
  window_c2_ += l2;
  window_actor_ += st.loss;
  window_target_std_ += st.target_std;
}

void Trainer::static_update() {
  const std::uint64_t u = state_.updates++;
  ++state_.env_steps;
  const Rng ur = rng_.split("update").stream(u);
  Rng action_rng = ur.split("actions");
  const Box box = cfg_.action_box();
  const int B = cfg_.sac.batch_size;
  Mat actions(box.dim(), B);
  for (int i = 0; i < B; ++i) actions.col(i) = uniform_in(box, action_rng);
  const MixtureQ q(cfg_.env.mixture(), cfg_.sac.beta);
  const ActorUpdateStats st = actor_update(agent_.actor, agent_.actor_opt, q, Mat(0, B), actions,
                                           cfg_.estimator_params(), box, schedule_, ur.split("actor"), exec_);
  ++window_updates_;
  window_actor_ += st.loss;
  window_target_std_ += st.target_std;
}

void Trainer::end_of_step() {
  const auto step = static_cast<std::int64_t>(state_.env_steps);
  if (step % cfg_.sac.log_interval == 0) {
    flush_row();
    if (write_artifacts_) write_metrics();
  }
  if (!is_static() && cfg_.eval.interval > 0 && step % cfg_.eval.interval == 0) {
    evals_.push_back(evaluate(step));
    const EvalResult& ev = evals_.back();
    spdlog::info("eval step {}: mean return {:.3f}, goals [{}, {}, {}, {}] of {}", step, ev.mean_return,
                 ev.goal_counts[0], ev.goal_counts[1], ev.goal_counts[2], ev.goal_counts[3], ev.episodes.size());
    if (write_artifacts_) write_evals();
    if (cfg_.sac.stop_at_coverage > 0 && !coverage_step_ && ev.goals_covered(cfg_.sac.stop_at_coverage) == 4) {
      coverage_step_ = step;
      stop_ = true;
    }
  }
  if (write_artifacts_ && cfg_.sac.checkpoint_interval > 0 && step % cfg_.sac.checkpoint_interval == 0)
    save("checkpoint_" + std::to_string(step) + ".bin");
}

void Trainer::flush_row() {
  MetricsRow r;
  r.step = static_cast<std::int64_t>(state_.env_steps);
  r.episode_return = state_.last_return;
  const double n = window_updates_;
  r.critic_loss_1 = window_updates_ > 0 && !is_static() ? window_c1_ / n : kNaN;
  r.critic_loss_2 = window_updates_ > 0 && !is_static() ? window_c2_ / n : kNaN;
  r.actor_loss = window_updates_ > 0 ? window_actor_ / n : kNaN;
  r.mean_logpi = window_logpi_count_ > 0 ? window_logpi_ / window_logpi_count_ : kNaN;
  if (!metrics_.empty() && metrics_.back().step >= r.step) return;
  metrics_.push_back(r);
  spdlog::info("step {}: return {:.3f} critic {:.4g}/{:.4g} actor {:.4g} logpi {:.3f} target std {:.4g}", r.step,
               r.episode_return, r.critic_loss_1, r.critic_loss_2, r.actor_loss, r.mean_logpi,
               window_updates_ > 0 ? window_target_std_ / n : kNaN);
  window_updates_ = 0;
  window_c1_ = window_c2_ = window_actor_ = window_logpi_ = window_target_std_ = 0;
  window_logpi_count_ = 0;
}

EvalResult Trainer::evaluate(std::int64_t step) const {
  if (is_static()) throw std::logic_error("evaluation rollouts need the multigoal environment");
  EvalResult res;
  res.step = step;
  const int episodes = cfg_.eval.episodes;
  res.episodes.resize(static_cast<std::size_t>(episodes));
  const Rng base = eval_stream(cfg_.seed, step);
  const CriticMinQ q(agent_.q1, agent_.q2);
  const MultiGoalConfig env_cfg = cfg_.env.multigoal();
  const int M = cfg_.eval.action_candidates;
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) if (exec_ == Exec::parallel)
  for (int e = 0; e < episodes; ++e) {
    try {
      Rng rng = base.stream(static_cast<std::uint64_t>(e));
      MultiGoalEnv env(env_cfg);
      EvalEpisode& ep = res.episodes[static_cast<std::size_t>(e)];
      Vec s = env.reset(rng);
      ep.states.push_back(s);
      for (;;) {
        const Selection sel = select_action(agent_.actor, q, s, M, sampler_cfg_, schedule_, rng);
        const StepResult st = env.step(sel.action);
        ep.actions.push_back(sel.action);
        ep.rewards.push_back(st.reward);
        ep.states.push_back(st.state);
        ep.total_return += st.reward;
        s = st.state;
        if (st.done) ep.goal = env.captured_goal(s);
        if (st.done || st.truncated) break;
      }
    } catch (...) {
#pragma omp critical(maxentdp_eval_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  double total = 0;
  for (const auto& ep : res.episodes) {
    if (ep.goal >= 0) ++res.goal_counts[static_cast<std::size_t>(ep.goal)];
    total += ep.total_return;
  }
  res.mean_return = total / episodes;
  return res;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint c;
  c.networks.push_back({agent_.actor.mlp(), agent_.actor_opt});
  if (!is_static()) {
    c.networks.push_back({agent_.q1, agent_.q1_opt});
    c.networks.push_back({agent_.q2, agent_.q2_opt});
    c.networks.push_back({agent_.q1_target, std::nullopt});
    c.networks.push_back({agent_.q2_target, std::nullopt});
  }
  c.train = state_;
  return c;
}

void Trainer::write_metrics() const {
  write_file_atomic((std::filesystem::path(cfg_.out) / "metrics.csv").string(), metrics_csv(metrics_));
}

void Trainer::write_evals() const {
  write_file_atomic((std::filesystem::path(cfg_.out) / "eval_trajectories.jsonl").string(), eval_jsonl(evals_));
  std::string csv = "step,episodes,mean_return,goal_0,goal_1,goal_2,goal_3\n";
  for (const auto& ev : evals_)
    csv += std::to_string(ev.step) + "," + std::to_string(ev.episodes.size()) + "," + format_double(ev.mean_return) +
           "," + std::to_string(ev.goal_counts[0]) + "," + std::to_string(ev.goal_counts[1]) + "," +
           std::to_string(ev.goal_counts[2]) + "," + std::to_string(ev.goal_counts[3]) + "\n";
  write_file_atomic((std::filesystem::path(cfg_.out) / "eval.csv").string(), csv);
}

void Trainer::save(const std::string& name) const {
  save_checkpoint((std::filesystem::path(cfg_.out) / name).string(), checkpoint());
}

}  // namespace maxentdp

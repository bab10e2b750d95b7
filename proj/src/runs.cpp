#include "maxentdp/runs.hpp"

#include <cmath>
#include <filesystem>
#include <spdlog/spdlog.h>

#include "maxentdp/kernels.hpp"

namespace maxentdp {

namespace fs = std::filesystem;

namespace {

void prepare_out_dir(const RunConfig& cfg) {
  try {
    fs::create_directories(cfg.out);
    write_file_atomic((fs::path(cfg.out) / "config.yaml").string(), serialize_config(cfg));
  } catch (const std::exception& e) {
    throw std::runtime_error("output directory '" + cfg.out + "' is not writable: " + e.what());
  }
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Closed-form E[exp(-k ||a0||^2)] for a0 ~ N(m, v I), in logs.
double quadratic_log_partition(double k, const Vec& m, double v) {
  const double d = static_cast<double>(m.size());
  const double denom = 1.0 + 2.0 * k * v;
  return -0.5 * d * std::log(denom) - k * m.squaredNorm() / denom;
}

}  // namespace

void run_train(const RunConfig& cfg, const std::optional<std::string>& resume) {
  prepare_out_dir(cfg);
  std::optional<Trainer> trainer;
  if (resume) {
    trainer.emplace(cfg, load_checkpoint(*resume), true);
    const fs::path metrics = fs::path(cfg.out) / "metrics.csv";
    if (fs::exists(metrics)) trainer->set_history(parse_metrics_csv(read_file(metrics.string())));
    spdlog::info("resuming from {} at step {}", *resume, trainer->state().env_steps);
  } else {
    trainer.emplace(cfg, true);
  }
  trainer->run();
  if (const auto step = trainer->coverage_step()) spdlog::info("all goals covered at step {}", *step);
}

EvalResult run_eval(const RunConfig& cfg, const std::string& checkpoint) {
  if (cfg.env.name != "multigoal") throw std::invalid_argument("eval needs env.name = \"multigoal\"");
  prepare_out_dir(cfg);
  const Trainer trainer(cfg, load_checkpoint(checkpoint));
  const auto step = static_cast<std::int64_t>(trainer.state().env_steps);
  EvalResult res = trainer.evaluate(step);
  write_file_atomic((fs::path(cfg.out) / "eval_trajectories.jsonl").string(), eval_jsonl({res}));
  spdlog::info("eval of step {}: mean return {:.4f}, goals [{}, {}, {}, {}] of {}", step, res.mean_return,
               res.goal_counts[0], res.goal_counts[1], res.goal_counts[2], res.goal_counts[3], res.episodes.size());
  return res;
}

std::vector<BenchCell> bench_estimators(const RunConfig& cfg) {
  const auto& b = cfg.bench;
  const NoiseSchedule schedule = cfg.schedule.make();
  const Box box = cfg.action_box();
  const Rng base = Rng(cfg.seed).split("bench");
  const MixtureTarget mixture = cfg.env.mixture();
  std::unique_ptr<QFunction> q;
  if (b.q == "quadratic")
    q = std::make_unique<QuadraticQ>(b.curvature, Vec::Zero(2));
  else
    q = std::make_unique<MixtureQ>(mixture, b.beta);
  const double var0 = b.beta / (2.0 * b.curvature);  // variance of exp(Q / beta) for the quadratic
  const Vec no_state;

  std::vector<BenchCell> cells;
  for (std::size_t ti = 0; ti < b.times.size(); ++ti) {
    const double t = b.times[ti];
    const auto [sig, noise] = schedule.signal_and_noise_var(t);
    Rng point_rng = base.split("points").stream(ti);
    std::vector<ProbePoint> points;
    std::vector<Vec> oracle;
    for (int p = 0; p < b.points; ++p) {
      Vec eps(2), a0(2);
      for (int j = 0; j < 2; ++j) eps[j] = point_rng.normal();
      if (b.q == "quadratic") {
        for (int j = 0; j < 2; ++j) a0[j] = std::sqrt(var0) * point_rng.normal();
      } else {
        const auto k = static_cast<std::size_t>(point_rng.below(mixture.means.size()));
        for (int j = 0; j < 2; ++j) a0[j] = mixture.means[k][j] + mixture.std * point_rng.normal();
      }
      const Vec a_t = schedule.perturb(a0, t, eps);
      points.push_back({a_t, t});
      const Vec score = b.q == "quadratic" ? Vec(-a_t / (sig * var0 + noise))
                                           : mixture_score_oracle(mixture, a_t, t, schedule);
      oracle.push_back(noise_from_score(score, t, schedule));
    }
    for (std::size_t ki = 0; ki < b.samples.size(); ++ki) {
      const EstimatorParams p{b.samples[ki], b.beta};
      for (const auto& name : b.estimators) {
        Estimator est;
        double jitter = 0;
        if (name == "qne") {
          est = [&](const Vec& a, double tt, Rng& r) { return qne_target(*q, no_state, a, tt, p, box, schedule, r); };
        } else if (name == "idem") {
          est = [&](const Vec& a, double tt, Rng& r) { return idem_target(*q, no_state, a, tt, p, box, schedule, r); };
        } else if (name == "qsm") {
          est = [&](const Vec& a, double tt, Rng&) { return qsm_target(*q, no_state, a, tt, b.beta, schedule); };
          jitter = b.jitter;
        } else {
          est = [&](const Vec& a, double tt, Rng& r) {
            const auto [s, n] = schedule.signal_and_noise_var(tt);
            const Vec m = a / std::sqrt(s);
            const double log_z = b.q == "quadratic" ? quadratic_log_partition(b.curvature / b.beta, m, n / s)
                                                    : mixture.log_candidate_partition(a, tt, schedule);
            return noise_from_score(is_score_estimate_log(*q, no_state, a, tt, p, log_z, schedule, r), tt, schedule);
          };
        }
        BenchCell cell{name, t, p.K, b.beta, points, oracle, {}, 0};
        cell.report = estimator_std(name, est, points, b.repeats, base.split(name).stream(ti).stream(ki), p.K,
                                    b.beta, jitter);
        double err = 0;
        for (std::size_t i = 0; i < points.size(); ++i)
          err += (cell.report.point_means[i] - oracle[i]).cwiseAbs().sum();
        cell.mean_abs_error = err / static_cast<double>(points.size() * 2);
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

std::vector<BenchCell> run_bench_estimators(const RunConfig& cfg) {
  prepare_out_dir(cfg);
  auto cells = bench_estimators(cfg);
  const std::string header =
      "estimator,t,K,beta,point_id,coord,mean_estimate,oracle_value,abs_error,sample_std\n";
  std::string summary = header;
  std::string detail = header;
  for (const auto& c : cells) {
    const std::string prefix = c.estimator + "," + fmt_double(c.t) + "," + std::to_string(c.K) + "," +
                               fmt_double(c.beta) + ",";
    double mean = 0, oracle = 0;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      mean += c.report.point_means[i].sum();
      oracle += c.oracle[i].sum();
      for (Eigen::Index j = 0; j < c.oracle[i].size(); ++j)
        detail += prefix + std::to_string(i) + "," + std::to_string(j) + "," +
                  fmt_double(c.report.point_means[i][j]) + "," + fmt_double(c.oracle[i][j]) + "," +
                  fmt_double(std::abs(c.report.point_means[i][j] - c.oracle[i][j])) + "," +
                  fmt_double(c.report.point_stds[i][j]) + "\n";
    }
    const double n = static_cast<double>(c.points.size() * 2);
    summary += prefix + "all,all," + fmt_double(mean / n) + "," + fmt_double(oracle / n) + "," +
               fmt_double(c.mean_abs_error) + "," + fmt_double(c.report.sample_std.mean()) + "\n";
  }
  write_file_atomic((fs::path(cfg.out) / "bench_estimators.csv").string(), summary);
  write_file_atomic((fs::path(cfg.out) / "bench_estimators_points.csv").string(), detail);
  return cells;
}

DiffusionNet actor_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.networks.empty()) throw CheckpointError("checkpoint holds no networks");
  const Mlp& net = ckpt.networks.front().net;
  const int adim = net.output_dim();
  const int sdim = net.input_dim() - adim - kTimeEmbedDim;
  if (sdim < 0) throw CheckpointError("first network is not a diffusion actor");
  return DiffusionNet(adim, sdim, net);
}

std::vector<LikelihoodRow> likelihood_grid(const RunConfig& cfg, const std::optional<std::string>& checkpoint) {
  const NoiseSchedule schedule = cfg.schedule.make();
  std::optional<std::string> ckpt_path = checkpoint;
  if (!ckpt_path && cfg.likelihood.model == "checkpoint") {
    if (cfg.likelihood.checkpoint.empty())
      throw ConfigError("likelihood.checkpoint", "required when likelihood.model = \"checkpoint\"");
    ckpt_path = cfg.likelihood.checkpoint;
  }
  std::unique_ptr<NoiseModel> model;
  std::function<std::optional<double>(const Vec&)> oracle = [](const Vec&) { return std::nullopt; };
  if (ckpt_path) {
    model = std::make_unique<DiffusionNet>(actor_from_checkpoint(load_checkpoint(*ckpt_path)));
  } else if (cfg.likelihood.model == "gaussian") {
    auto g = std::make_unique<GaussianNoiseOracle>(schedule, 2);
    oracle = [m = g.get()](const Vec& a) { return std::optional<double>(m->log_density(a)); };
    model = std::move(g);
  } else {
    const MixtureTarget mixture = cfg.env.mixture();
    model = std::make_unique<MixtureNoiseOracle>(mixture, schedule);
    oracle = [mixture](const Vec& a) { return std::optional<double>(mixture_logprob_oracle(mixture, a)); };
  }
  if (model->action_dim() != 2) throw std::invalid_argument("likelihood grid needs a 2-D action model");

  const int G = cfg.likelihood.grid;
  const double lo = cfg.likelihood.box_low;
  const double hi = cfg.likelihood.box_high;
  Mat actions(2, G * G);
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      actions(0, i * G + j) = lo + (hi - lo) * i / (G - 1);
      actions(1, i * G + j) = lo + (hi - lo) * j / (G - 1);
    }
  const Mat states = Mat::Zero(model->state_dim(), actions.cols());
  const Vec lp = log_probs(*model, states, actions, cfg.likelihood_config(), schedule,
                           Rng(cfg.seed).split("likelihood"), cfg.sac.parallel ? Exec::parallel : Exec::serial);
  std::vector<LikelihoodRow> rows;
  for (Eigen::Index c = 0; c < actions.cols(); ++c)
    rows.push_back({actions(0, c), actions(1, c), lp[c], oracle(actions.col(c))});
  return rows;
}

std::vector<LikelihoodRow> run_check_likelihood(const RunConfig& cfg, const std::optional<std::string>& checkpoint) {
  prepare_out_dir(cfg);
  auto rows = likelihood_grid(cfg, checkpoint);
  std::string csv = "x,y,logprob_estimate,oracle_logprob\n";
  for (const auto& r : rows)
    csv += fmt_double(r.x) + "," + fmt_double(r.y) + "," + fmt_double(r.estimate) + "," +
           (r.oracle ? fmt_double(*r.oracle) : "") + "\n";
  write_file_atomic((fs::path(cfg.out) / "likelihood.csv").string(), csv);
  return rows;
}

}  // namespace maxentdp

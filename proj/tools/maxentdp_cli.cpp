#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <spdlog/spdlog.h>
#include <string>

#include "maxentdp/runs.hpp"

using namespace maxentdp;

namespace {

void configure_logging() {
  const char* level = std::getenv("MAXENTDP_LOG");
  const std::string name = level ? level : "info";
  if (name == "error")
    spdlog::set_level(spdlog::level::err);
  else if (name == "debug")
    spdlog::set_level(spdlog::level::debug);
  else if (name == "info")
    spdlog::set_level(spdlog::level::info);
  else
    throw std::invalid_argument("MAXENTDP_LOG must be error, info or debug");
}

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "configuration file (YAML)");
  cmd->add_option("--seed", f.seed, "overrides the seed in the config file");
  cmd->add_option("--out", f.out, "output directory (overrides the config file)");
}

RunConfig load(const CommonFlags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : parse_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.out = f.out;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum-entropy RL with a diffusion policy"};
  app.require_subcommand(1);

  CommonFlags train_f, eval_f, bench_f, lik_f;
  std::optional<std::string> resume, eval_ckpt, lik_ckpt;

  auto* train = app.add_subcommand("train", "run the training loop");
  add_common(train, train_f);
  train->add_option("--resume", resume, "continue from a checkpoint");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint with best-of-M action selection");
  add_common(eval, eval_f);
  eval->add_option("--checkpoint,--resume", eval_ckpt, "checkpoint to evaluate")->required();

  auto* bench = app.add_subcommand("bench-estimators", "bias/variance sweep of the target-noise estimators");
  add_common(bench, bench_f);

  auto* lik = app.add_subcommand("check-likelihood", "log-probability map over a 2-D action grid");
  add_common(lik, lik_f);
  lik->add_option("--checkpoint,--resume", lik_ckpt, "use the actor from this checkpoint");

  CLI11_PARSE(app, argc, argv);

  try {
    configure_logging();
    if (*train) {
      run_train(load(train_f), resume);
    } else if (*eval) {
      const EvalResult r = run_eval(load(eval_f), *eval_ckpt);
      std::cout << "step " << r.step << " mean_return " << r.mean_return << " goals " << r.goal_counts[0] << " "
                << r.goal_counts[1] << " " << r.goal_counts[2] << " " << r.goal_counts[3] << "\n";
    } else if (*bench) {
      const RunConfig cfg = load(bench_f);
      const auto cells = run_bench_estimators(cfg);
      std::cout << "wrote " << cells.size() << " cells to "
                << (std::filesystem::path(cfg.out) / "bench_estimators.csv").string() << "\n";
    } else if (*lik) {
      const RunConfig cfg = load(lik_f);
      const auto rows = run_check_likelihood(cfg, lik_ckpt);
      std::cout << "wrote " << rows.size() << " grid points to "
                << (std::filesystem::path(cfg.out) / "likelihood.csv").string() << "\n";
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kdlr/experiment.hpp"

namespace {

void apply_threads(int threads) {
  if (threads <= 0) {
    if (const char* env = std::getenv("KDLR_THREADS"))
      threads = std::atoi(env);
  }
  if (threads <= 0)
    threads = 1;
#ifdef _OPENMP
  omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

kdlr::ExperimentConfig load(const std::string& path, const std::string& output) {
  kdlr::ExperimentConfig cfg = kdlr::load_config_file(path);
  if (!output.empty())
    cfg.output = output;
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"kdlr: dynamical low-rank solver for the "
               "Vlasov-Ampere-Fokker-Planck system in the high-field scaling"};
  app.require_subcommand(1);

  std::string config_path, output;
  int threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (fallback: KDLR_THREADS, default 1)");
  app.add_option("--output", output, "override the configured output directory");

  auto* run = app.add_subcommand("run", "time-step one configured experiment");
  run->add_option("config", config_path, "config file")->required();
  auto* conv = app.add_subcommand(
      "convergence", "grid-refinement study over the configured sweep");
  conv->add_option("config", config_path, "config file")->required();
  auto* bench =
      app.add_subcommand("bench", "median wall time per raw solver step");
  bench->add_option("config", config_path, "config file")->required();

  CLI11_PARSE(app, argc, argv);
  apply_threads(threads);

  try {
    kdlr::ExperimentConfig cfg = load(config_path, output);
    if (run->parsed()) {
      kdlr::RunResult res = kdlr::run_experiment(cfg);
      std::printf("%s: %zu steps to t = %g, %.1f ms total; history in %s\n",
                  kdlr::solver_name(cfg.solver).c_str(),
                  res.history.size() - 1, cfg.t_final, res.elapsed_ms,
                  (cfg.output + "/history.csv").c_str());
    } else if (conv->parsed()) {
      kdlr::ConvergenceResult res = kdlr::run_convergence(cfg);
      std::printf("x sweep slope %.3f, v sweep slope %.3f; tables in %s\n",
                  res.slope_x, res.slope_v, cfg.output.c_str());
    } else if (bench->parsed()) {
      kdlr::BenchResult res = kdlr::run_bench(cfg);
      std::printf("median step time %.3f ms over %d steps\n",
                  res.median_step_ms, res.steps);
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kdlr/config.hpp"
#include "kdlr/diagnostics.hpp"
#include "kdlr/field.hpp"
#include "kdlr/grid.hpp"
#include "kdlr/reference.hpp"
#include "kdlr/splitting.hpp"
#include "kdlr/state.hpp"

namespace kdlr {

/// Sampled initial data shared by all three solvers: the Maxwellian quotient
/// g0 on the phase grid (regularized in the far tail, see below), the Poisson
/// field, and the neutralized background.
struct InitialData {
  Grid grid;
  Eigen::MatrixXd f0; // phase-space distribution samples
  Eigen::MatrixXd g0; // f0 / (M(E0) + delta); delta = M six deviations out
  FieldState field;

  explicit InitialData(Grid g) : grid(std::move(g)) {}
};

InitialData build_initial_data(const ExperimentConfig& cfg);

/// Outcome of one run; the member matching the solver kind is filled.
struct RunResult {
  RunHistory history;
  std::optional<LowRankState> state;   // lowrank
  std::optional<Eigen::MatrixXd> g;    // fulltensor quotient samples
  std::optional<Eigen::VectorXd> rho;  // fluid
  std::optional<FieldState> field;
  double elapsed_ms = 0.0;
};

/// Time-step the configured solver to t_final. With write_outputs set, emits
/// history.csv, snapshot checkpoints, the final checkpoint, and gnuplot
/// scripts under cfg.output.
RunResult run_experiment(const ExperimentConfig& cfg, bool write_outputs = true);

struct ConvergenceResult {
  std::vector<int> grids;
  std::vector<double> diffs_x; // successive L1 differences, x sweep
  std::vector<double> diffs_v;
  double slope_x = 0.0;
  double slope_v = 0.0;
};

/// Grid-refinement study: sweeps nx over cfg.conv_grids at the finest nv, then
/// nv at the finest nx, and fits the observed order of the successive L1
/// differences of the final distribution.
ConvergenceResult run_convergence(const ExperimentConfig& cfg,
                                  bool write_outputs = true);

struct BenchResult {
  double median_step_ms = 0.0;
  int steps = 0;
};

/// Median wall time per raw solver step (diagnostics excluded), after one
/// warmup step.
BenchResult run_bench(const ExperimentConfig& cfg, bool write_outputs = true);

} // namespace kdlr

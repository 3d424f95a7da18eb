#pragma once

#include <string>

#include "kdlr/gmres.hpp"

namespace kdlr {

enum class SolverKind { LowRank, FullTensor, Fluid };
enum class ICKind {
  Counterstreaming,
  LocalEquilibrium,
  BumpOnTail,
  PotentialHill2D,
  ColdBeam2D,
  Custom
};

/// One experiment run, parsed from key = value text. Unknown keys are
/// rejected; validation covers solver/IC compatibility (2D ICs need d = 2,
/// the rank is meaningful only for the low-rank solver).
struct ExperimentConfig {
  SolverKind solver = SolverKind::LowRank;
  ICKind ic = ICKind::Counterstreaming;
  int d = 1;
  int nx = 0;
  int nv = 0;
  int r = 0;
  double epsilon = 0.0;
  double dt = 0.0;  // 0: derive from cfl
  double cfl = 0.25;
  double t_final = 0.0;
  double v_lo = -10.0;
  double v_hi = 10.0;
  GmresOptions gmres; // tol 1e-10, restart 30, max_iter 400 defaults
  std::string output = "out";
  int snapshot_every = 0; // 0: only the final state
  std::string ic_file;    // checkpoint path for ic = custom
  int bench_steps = 20;
  std::string conv_grids = "64,128,256,512";

  /// Time step: dt if set, else cfl * dx / v_max.
  double resolved_dt() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

std::string solver_name(SolverKind s);
std::string ic_name(ICKind ic);

} // namespace kdlr

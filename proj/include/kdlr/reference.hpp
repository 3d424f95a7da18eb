#pragma once

#include <memory>

#include <Eigen/Core>

#include "kdlr/collision.hpp"
#include "kdlr/field.hpp"
#include "kdlr/grid.hpp"
#include "kdlr/maxwellian.hpp"

namespace kdlr {

/// Reference solver on the full Nx x Nv phase-space grid. It evolves the
/// Maxwellian quotient g = f/M with the same flux-limited x-transport and the
/// same Maxwellian-weighted v-diffusion stencils as the low-rank solver, so
/// comparisons between the two isolate the rank truncation error.
class FullTensorSolver {
public:
  struct Options {
    double dt = 0.0;
    double epsilon = 1.0;
    GmresOptions gmres;
  };

  FullTensorSolver(const Grid& grid, const Options& opt);

  /// One IMEX step: E' = E - dt J(g), explicit transport and Maxwellian-drag
  /// term, implicit collision solve per x column (tridiagonal in 1D,
  /// preconditioned GMRES in 2D).
  void step(Eigen::MatrixXd& g, FieldState& field);

  /// f = M(E) * g on the phase grid.
  Eigen::MatrixXd distribution(const Eigen::MatrixXd& g,
                               const Eigen::MatrixXd& E) const;

  /// rho and J by direct quadrature of M g.
  Moments moments(const Eigen::MatrixXd& g, const Eigen::MatrixXd& E) const;

  const Options& options() const { return opt_; }

private:
  const Grid& grid_;
  Options opt_;
  std::unique_ptr<LPreconditioner> precond_; // used for the 2D collision solves
};

/// One step of the limiting fluid system: conservative flux-limited update of
/// rho with local speed E, then E' = E - dt rho E.
void fluid_step(Eigen::VectorXd& rho, Eigen::MatrixXd& E, const Grid& grid,
                double dt);

} // namespace kdlr

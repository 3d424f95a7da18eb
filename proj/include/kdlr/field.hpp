#pragma once

#include <Eigen/Core>

#include "kdlr/grid.hpp"

namespace kdlr {

/// Electric field state plus the cached moments it is coupled to.
/// Invariant at t = 0: the discrete Gauss residual vanishes to roundoff and
/// the spatial mean of rho - eta is zero (periodic Poisson solvability).
struct FieldState {
  Eigen::MatrixXd E;   // Nx x d
  Eigen::MatrixXd J;   // Nx x d
  Eigen::VectorXd rho; // Nx
  Eigen::VectorXd eta; // Nx, static background density
};

/// Pointwise functionals of (E, J) entering the time derivative of the
/// Maxwellian weight: M1 = E.J, M2 = -J - grad(|E|^2)/2, M3 = grad E.
struct FieldFunctionals {
  Eigen::VectorXd M1; // Nx
  Eigen::MatrixXd M2; // Nx x d
  Eigen::MatrixXd M3; // Nx x d*d, column i + d*j holds d/dx_j E_i
};

struct PoissonResult {
  Eigen::MatrixXd E;
  Eigen::VectorXd eta;   // possibly rescaled to restore neutrality
  double eta_scale = 1.0;
};

/// Solve -lap(phi) = rho - eta on the periodic grid via FFT diagonalization of
/// the second-order centered difference operators, E = -grad(phi) with
/// zero-mean gauge. The centered discrete divergence of the returned field
/// reproduces rho - eta to roundoff. If the source is not neutral, eta is
/// rescaled multiplicatively first and the applied scale reported.
PoissonResult solve_poisson(const Eigen::VectorXd& rho, const Eigen::VectorXd& eta,
                            const Grid& grid);

/// Forward Euler Ampere update E' = E - dt * J.
Eigen::MatrixXd ampere_step(const Eigen::MatrixXd& E, const Eigen::MatrixXd& J,
                            double dt);

/// L1 norm of div(E) - (rho - eta) with centered second-order divergence.
double gauss_residual(const Eigen::MatrixXd& E, const Eigen::VectorXd& rho,
                      const Eigen::VectorXd& eta, const Grid& grid);

/// Assemble M1, M2, M3 from (E, J) with centered second-order gradients.
/// Note |E|^2 is the squared norm summed over components, so grad(|E|^2)/2
/// is not E . grad E.
FieldFunctionals field_functionals(const Eigen::MatrixXd& E,
                                   const Eigen::MatrixXd& J, const Grid& grid);

} // namespace kdlr

#pragma once

#include <vector>

#include <Eigen/Core>

#include "kdlr/coeffs.hpp"
#include "kdlr/grid.hpp"

namespace kdlr {

/// Per-axis eigendecomposition of the symmetric flux matrices c1:
/// T[m]^T c1[m] T[m] = diag(lambda[m]), eigenvalues ascending, eigenvector
/// sign fixed so the first nonzero component is positive.
struct FluxEigensystem {
  std::vector<Eigen::MatrixXd> T;
  std::vector<Eigen::VectorXd> lambda;
};

FluxEigensystem eigendecompose_flux(const std::vector<Eigen::MatrixXd>& c1);

/// Van Leer limiter, phi(theta) = (|theta| + theta) / (1 + |theta|).
double van_leer(double theta);

/// Flux-limited approximation of lambda * d/dx of a periodic scalar line:
/// upwind flux plus a limited Lax-Wendroff correction, returned as
/// (F_{p+1/2} - F_{p-1/2}) / dx.
Eigen::VectorXd limited_derivative(const Eigen::VectorXd& khat, double lambda,
                                   double dx, double dt);

/// Conservative flux-limited divergence d/dx (s u) for a spatially varying
/// speed, with s evaluated at interfaces by averaging. Used by the limiting
/// fluid solver; reduces to limited_derivative for constant s.
Eigen::VectorXd conservative_limited_divergence(const Eigen::VectorXd& u,
                                                const Eigen::VectorXd& speed,
                                                double dx, double dt);

/// Explicit right-hand side of the K equation,
///   -sum_l c1_jl . grad_x K_l - sum_l A1_jl K_l,
/// evaluated by rotating into the per-axis eigenbasis, applying the limited
/// derivative to each eigencomponent line, and rotating back (unsplit sum over
/// axes). Sets *cfl_exceeded when max |lambda| dt / dx > 1; the scheme still
/// evaluates.
Eigen::MatrixXd k_transport_rhs(const Eigen::MatrixXd& K,
                                const FluxEigensystem& eig,
                                const std::vector<Eigen::MatrixXd>& A1,
                                const Grid& grid, double dt,
                                bool* cfl_exceeded = nullptr);

} // namespace kdlr

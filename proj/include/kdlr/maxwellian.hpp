#pragma once

#include <array>
#include <memory>

#include <Eigen/Core>

#include "kdlr/grid.hpp"
#include "kdlr/state.hpp"

namespace kdlr {

/// Maxwellian-weighted velocity moments of the basis functions, tabulated on
/// the zeta-grid (which equals the v-grid):
///   ell_j(zeta) = integral w(u) V_j(u) exp(-|zeta - u|^2 / 2) du,
/// with w = 1 or one velocity component.
struct MomentTable {
  Eigen::MatrixXd ell; // Nv x r
  int weight_axis;     // -1 for w = 1, else the component of v used as weight
};

/// Local Maxwellian samples M(v) = (2pi)^{-d/2} exp(-|v - center|^2 / 2).
Eigen::VectorXd maxwellian(const std::array<double, 2>& center, const Grid& grid);

struct Moments {
  Eigen::VectorXd rho; // Nx
  Eigen::MatrixXd J;   // Nx x d
};

/// FFT convolution engine for the moment tables. The kernel is the fixed-width
/// Gaussian of the isothermal Maxwellian; arrays are zero-padded to twice the
/// grid length per axis so the discrete convolution is exactly the trapezoid
/// quadrature of the integral. Instances own FFT plans and scratch buffers and
/// must not be shared across concurrent callers.
class MomentConvolver {
public:
  explicit MomentConvolver(const Grid& grid);
  ~MomentConvolver();
  MomentConvolver(const MomentConvolver&) = delete;
  MomentConvolver& operator=(const MomentConvolver&) = delete;

  /// Tabulate ell_j for every column of V. weight_axis = -1 selects w = 1.
  MomentTable moment_convolution(const Eigen::MatrixXd& V, int weight_axis) const;

  /// I_j(x) = (2pi)^{-d/2} ell_j(E(x)) by (bi)linear interpolation on the
  /// zeta-grid. Throws SolverError naming the offending point when E leaves
  /// the tabulated range (the v-domain is too small for the field).
  Eigen::MatrixXd evaluate_at_field(const MomentTable& table,
                                    const Eigen::MatrixXd& E) const;

private:
  const Grid& grid_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// rho(x) = sum_ij X_i S_ij I_j^{(1)}(x), J_m(x) = sum_ij X_i S_ij I_j^{(v_m)}(x).
Moments macroscopic_moments(const LowRankState& state, const Eigen::MatrixXd& E,
                            const Grid& grid, const MomentConvolver& conv);

} // namespace kdlr

#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "kdlr/gmres.hpp"
#include "kdlr/grid.hpp"

namespace kdlr {

/// The Maxwellian-weighted diffusion stencil T(e) discretizing
/// (1/M) div_v (M grad_v .) with M centered at the shift e. Stored as per-axis
/// half-node weight ratios a± = M_{p±1/2}/M_p and applied in flux form, so
/// constants are annihilated exactly (including the zero-flux boundary rows,
/// where the outermost half-node weight is zero).
class DiffusionStencil {
public:
  DiffusionStencil() = default;
  DiffusionStencil(const std::array<double, 2>& shift, const Grid& grid,
                   bool* boundary_warning = nullptr);

  void apply(const Eigen::VectorXd& L, Eigen::VectorXd& out) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& L) const;

  /// Sparse assembly of I - a T, used to factor the preconditioner.
  Eigen::SparseMatrix<double> assemble_identity_minus(double a) const;

  const std::array<double, 2>& shift() const { return shift_; }
  /// Per-axis half-node weight ratios (M_{p+1/2}/M_p and M_{p-1/2}/M_p).
  const Eigen::VectorXd& axis_a_plus(int m) const { return a_plus_[m]; }
  const Eigen::VectorXd& axis_a_minus(int m) const { return a_minus_[m]; }

private:
  const Grid* grid_ = nullptr;
  std::array<double, 2> shift_{0.0, 0.0};
  // ratio arrays per axis, indexed by the per-axis node
  std::vector<Eigen::VectorXd> a_plus_, a_minus_;
};

DiffusionStencil assemble_T(const std::array<double, 2>& shift, const Grid& grid,
                            bool* boundary_warning = nullptr);

/// Drift operator U = e . grad_v with centered second-order differences
/// (one-sided at the v-bounds).
class DriftStencil {
public:
  DriftStencil() = default;
  DriftStencil(const std::array<double, 2>& e, const Grid& grid);
  void apply(const Eigen::VectorXd& L, Eigen::VectorXd& out) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& L) const;

private:
  const Grid* grid_ = nullptr;
  std::array<double, 2> e_{0.0, 0.0};
};

DriftStencil assemble_U(const std::array<double, 2>& e, const Grid& grid);

/// Solve [I - a A2(x)] K(x) = rhs(x) independently at every x point by dense
/// LU with full pivoting; a = dt/eps. Throws SolverError naming the x index
/// when a local system is singular.
Eigen::MatrixXd solve_k_collision(const Eigen::MatrixXd& rhs,
                                  const std::vector<Eigen::MatrixXd>& A2,
                                  double a);

/// Block-diagonal preconditioner (I - a T(0))^{-1}, factored once with a
/// sparse direct solver and applied per coefficient column.
class LPreconditioner {
public:
  LPreconditioner(const Grid& grid, double a);
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out, int r) const;
  double a() const { return a_; }

private:
  double a_;
  Eigen::Index nv_;
  Eigen::SparseMatrix<double> mat_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

/// Solve the coupled implicit L system
///   [delta_ik - a (delta_ik T_k(e*_kk) + U_ik)] L_k = rhs_i
/// by restarted GMRES, right-preconditioned with (I - a T(0))^{-1}. estar
/// holds the drift vectors, one r x r matrix per axis; only its off-diagonal
/// entries enter (the diagonal shift lives inside T_k). rhs and the result are
/// Nv x r with column k holding L_k.
Eigen::MatrixXd solve_l_system(const Eigen::MatrixXd& rhs,
                               const std::vector<DiffusionStencil>& T_ops,
                               const std::vector<Eigen::MatrixXd>& estar,
                               double a, const Grid& grid,
                               const LPreconditioner& precond,
                               const GmresOptions& opt,
                               GmresStats* stats = nullptr);

} // namespace kdlr

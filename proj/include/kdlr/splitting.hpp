#pragma once

#include <memory>

#include <Eigen/Core>

#include "kdlr/coeffs.hpp"
#include "kdlr/collision.hpp"
#include "kdlr/field.hpp"
#include "kdlr/maxwellian.hpp"
#include "kdlr/state.hpp"
#include "kdlr/transport.hpp"

namespace kdlr {

/// The stiff S flow is integrated by Forward Euler in both tensors so the
/// backward-Euler K flow and the S flow cancel exactly on homogeneous
/// equilibria; the IMEX variant destroys that cancellation and exists only so
/// tests can demonstrate the failure mode.
enum class SStepScheme { ForwardEuler, Imex };

struct StepOptions {
  double dt = 0.0;
  double epsilon = 1.0;
  GmresOptions gmres;
  SStepScheme s_scheme = SStepScheme::ForwardEuler;
};

struct StepReport {
  long step = 0;
  double ms_field = 0.0;
  double ms_k = 0.0;
  double ms_s = 0.0;
  double ms_l = 0.0;
  double ms_report = 0.0;
  double ms_total = 0.0;
  GmresStats gmres;
  Eigen::VectorXd sigma; // singular values after the step, descending
  double gauss_residual = 0.0;
  double mass = 0.0;
  bool cfl_warning = false;
  bool boundary_warning = false;
};

struct KStepResult {
  Eigen::MatrixXd X;
  Eigen::MatrixXd S;
  bool cfl_warning = false;
};

/// One IMEX step of the K equation: explicit flux-limited transport and A1
/// term, implicit pointwise collision solve, then a weighted QR of K^{n+1}.
KStepResult k_step(const LowRankState& state, const VelocityCoeffs& vc,
                   const FieldFunctionals& ff, const Eigen::MatrixXd& E,
                   const Grid& grid, double dt, double eps);

/// Forward Euler step of the S equation (both tensors explicit):
/// S2 = S1 + dt B1[S1] - (dt/eps) B2[S1].
Eigen::MatrixXd s_step(const Eigen::MatrixXd& S1, const STensors& st, double dt,
                       double eps, SStepScheme scheme = SStepScheme::ForwardEuler);

struct LStepResult {
  Eigen::MatrixXd V;
  Eigen::MatrixXd S; // stored so that L_i = sum_j S_ij V_j
  GmresStats gmres;
  bool boundary_warning = false;
};

/// One IMEX step of the L equation: explicit (v . dstar + chat) term, implicit
/// Maxwellian-weighted diffusion and drift via preconditioned GMRES, then a
/// weighted QR of L^{n+1} with S^{n+1} = R^T.
LStepResult l_step(const Eigen::MatrixXd& S2, const Eigen::MatrixXd& V,
                   const SpaceCoeffs& sc, const Grid& grid, double dt, double eps,
                   const LPreconditioner& precond, const GmresOptions& gmres);

/// Drives one full time step: Ampere field update from the old-state moments,
/// then the Lie-Trotter K -> S -> L cycle with all coefficient tensors frozen
/// at time level n. Owns the moment convolver and the factored L
/// preconditioner. One instance must not be advanced concurrently.
class Stepper {
public:
  Stepper(const Grid& grid, const StepOptions& opt);

  StepReport advance(LowRankState& state, FieldState& field);

  const MomentConvolver& convolver() const { return conv_; }
  const StepOptions& options() const { return opt_; }

private:
  const Grid& grid_;
  StepOptions opt_;
  MomentConvolver conv_;
  LPreconditioner precond_;
  long step_count_ = 0;
};

} // namespace kdlr

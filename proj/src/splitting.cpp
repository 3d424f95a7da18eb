#include "kdlr/splitting.hpp"

#include <Eigen/Dense>
#include <chrono>

namespace kdlr {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

} // namespace

KStepResult k_step(const LowRankState& state, const VelocityCoeffs& vc,
                   const FieldFunctionals& ff, const Eigen::MatrixXd& E,
                   const Grid& grid, double dt, double eps) {
  Eigen::MatrixXd K = state.X * state.S;
  KStepMatrices km = k_matrices(vc, ff, E);
  FluxEigensystem eig = eigendecompose_flux(vc.c1);

  KStepResult res;
  Eigen::MatrixXd rhs =
      K + dt * k_transport_rhs(K, eig, km.A1, grid, dt, &res.cfl_warning);
  Eigen::MatrixXd Knew = solve_k_collision(rhs, km.A2, dt / eps);

  QRFactors qr = reorthonormalize(Knew, grid.x_weight());
  res.X = std::move(qr.Q);
  res.S = std::move(qr.R);
  return res;
}

Eigen::MatrixXd s_step(const Eigen::MatrixXd& S1, const STensors& st, double dt,
                       double eps, SStepScheme scheme) {
  const Eigen::Index r = S1.rows();
  Eigen::VectorXd flat(r * r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j)
      flat(i * r + j) = S1(i, j);

  Eigen::VectorXd out;
  if (scheme == SStepScheme::ForwardEuler) {
    out = flat + dt * (st.B1 * flat) - (dt / eps) * (st.B2 * flat);
  } else {
    // test-only IMEX variant: implicit in the stiff tensor
    Eigen::MatrixXd lhs =
        Eigen::MatrixXd::Identity(r * r, r * r) + (dt / eps) * st.B2;
    out = lhs.partialPivLu().solve(flat + dt * (st.B1 * flat));
  }

  Eigen::MatrixXd S2(r, r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j)
      S2(i, j) = out(i * r + j);
  return S2;
}

LStepResult l_step(const Eigen::MatrixXd& S2, const Eigen::MatrixXd& V,
                   const SpaceCoeffs& sc, const Grid& grid, double dt, double eps,
                   const LPreconditioner& precond, const GmresOptions& gmres) {
  const int d = grid.dim();
  const Eigen::Index nv = grid.total_nv();
  const Eigen::Index r = S2.rows();

  Eigen::MatrixXd L = V * S2.transpose(); // column i holds L_i

  // explicit part: rhs_i = L_i - dt sum_k (v . dstar_ik + chat_ik) L_k
  std::vector<Eigen::MatrixXd> chat = l_matrix(sc, grid);
  Eigen::MatrixXd rhs(nv, r);
  for (Eigen::Index q = 0; q < nv; ++q) {
    Eigen::MatrixXd Mq = chat[q];
    auto v = grid.v_coord(q);
    for (int m = 0; m < d; ++m)
      Mq += v[m] * sc.dstar[m];
    rhs.row(q) = L.row(q) - dt * (L.row(q) * Mq.transpose());
  }

  LStepResult res;
  std::vector<DiffusionStencil> T_ops;
  T_ops.reserve(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    std::array<double, 2> shift{0.0, 0.0};
    for (int m = 0; m < d; ++m)
      shift[m] = sc.estar[m](k, k);
    T_ops.emplace_back(shift, grid, &res.boundary_warning);
  }

  Eigen::MatrixXd Lnew = solve_l_system(rhs, T_ops, sc.estar, dt / eps, grid,
                                        precond, gmres, &res.gmres);

  QRFactors qr = reorthonormalize(Lnew, grid.v_weights());
  res.V = std::move(qr.Q);
  res.S = qr.R.transpose();
  return res;
}

Stepper::Stepper(const Grid& grid, const StepOptions& opt)
    : grid_(grid), opt_(opt), conv_(grid),
      precond_(grid, opt.dt / opt.epsilon) {
  if (!(opt.dt > 0.0))
    throw ConfigError("Stepper: dt must be positive");
  if (!(opt.epsilon > 0.0))
    throw ConfigError("Stepper: epsilon must be positive");
}

StepReport Stepper::advance(LowRankState& state, FieldState& field) {
  const auto t_total = Clock::now();
  StepReport rep;
  rep.step = ++step_count_;

  // Step 1: moments of the current state, then the Ampere update. All field
  // functionals and coefficient tensors below use (E^n, J^n).
  auto t0 = Clock::now();
  Moments mom = macroscopic_moments(state, field.E, grid_, conv_);
  field.rho = mom.rho;
  field.J = mom.J;
  const Eigen::MatrixXd E_old = field.E;
  field.E = ampere_step(field.E, field.J, opt_.dt);
  FieldFunctionals ff = field_functionals(E_old, field.J, grid_);
  rep.ms_field = ms_since(t0);

  // K step
  t0 = Clock::now();
  VelocityCoeffs vc = velocity_inner_products(state.V, grid_);
  KStepResult kr = k_step(state, vc, ff, E_old, grid_, opt_.dt, opt_.epsilon);
  rep.cfl_warning = kr.cfl_warning;
  rep.ms_k = ms_since(t0);

  // S step
  t0 = Clock::now();
  SpaceCoeffs sc = space_inner_products(kr.X, ff, E_old, grid_);
  STensors st = s_tensors(vc, sc);
  Eigen::MatrixXd S2 = s_step(kr.S, st, opt_.dt, opt_.epsilon, opt_.s_scheme);
  rep.ms_s = ms_since(t0);

  // L step
  t0 = Clock::now();
  LStepResult lr = l_step(S2, state.V, sc, grid_, opt_.dt, opt_.epsilon,
                          precond_, opt_.gmres);
  rep.gmres = lr.gmres;
  rep.boundary_warning = lr.boundary_warning;
  state.X = std::move(kr.X);
  state.V = std::move(lr.V);
  state.S = std::move(lr.S);
  rep.ms_l = ms_since(t0);

  // post-step diagnostics; refresh the cached moments to the new time level
  t0 = Clock::now();
  rep.sigma = singular_values(state);
  Moments mom2 = macroscopic_moments(state, field.E, grid_, conv_);
  field.rho = mom2.rho;
  field.J = mom2.J;
  rep.mass = mom2.rho.sum() * grid_.x_weight();
  rep.gauss_residual = gauss_residual(field.E, field.rho, field.eta, grid_);
  rep.ms_report = ms_since(t0);

  rep.ms_total = ms_since(t_total);
  return rep;
}

} // namespace kdlr

#include "kdlr/reference.hpp"

#include <cmath>
#include <vector>

#include "kdlr/transport.hpp"

namespace kdlr {

namespace {

// Thomas solve of (I - a T) u = b for the 1D diffusion stencil.
Eigen::VectorXd tridiagonal_collision_solve(const DiffusionStencil& T, double a,
                                            double dv,
                                            const Eigen::VectorXd& b) {
  const int n = static_cast<int>(b.size());
  const double s = a / (dv * dv);
  const Eigen::VectorXd& ap = T.axis_a_plus(0);
  const Eigen::VectorXd& am = T.axis_a_minus(0);

  Eigen::VectorXd diag(n), upper(n), rhs = b;
  for (int p = 0; p < n; ++p) {
    diag(p) = 1.0 + s * (ap(p) + am(p));
    upper(p) = -s * ap(p);
  }
  // forward sweep
  for (int p = 1; p < n; ++p) {
    const double w = (-s * am(p)) / diag(p - 1);
    diag(p) -= w * upper(p - 1);
    rhs(p) -= w * rhs(p - 1);
  }
  Eigen::VectorXd u(n);
  u(n - 1) = rhs(n - 1) / diag(n - 1);
  for (int p = n - 2; p >= 0; --p)
    u(p) = (rhs(p) - upper(p) * u(p + 1)) / diag(p);
  return u;
}

// Apply the conservative flux-limited divergence along one x-axis of a field
// sampled on the tensor grid, constant speed per call.
void add_axis_advection(const Eigen::VectorXd& field, int axis, double speed,
                        const Grid& g, double dt, Eigen::VectorXd& out) {
  const int n = g.nx_per_axis();
  const Eigen::Index total = g.total_nx();
  const Eigen::Index nlines = total / n;
  Eigen::VectorXd line(n);
  for (Eigen::Index l = 0; l < nlines; ++l) {
    const Eigen::Index start = axis == 0 ? l * n : l;
    const Eigen::Index stride = axis == 0 ? 1 : n;
    for (int p = 0; p < n; ++p)
      line(p) = field(start + p * stride);
    Eigen::VectorXd dl = limited_derivative(line, speed, g.dx(), dt);
    for (int p = 0; p < n; ++p)
      out(start + p * stride) += dl(p);
  }
}

} // namespace

FullTensorSolver::FullTensorSolver(const Grid& grid, const Options& opt)
    : grid_(grid), opt_(opt) {
  if (!(opt.dt > 0.0) || !(opt.epsilon > 0.0))
    throw ConfigError("FullTensorSolver: dt and epsilon must be positive");
  if (grid.dim() == 2)
    precond_ = std::make_unique<LPreconditioner>(grid, opt.dt / opt.epsilon);
}

Eigen::MatrixXd FullTensorSolver::distribution(const Eigen::MatrixXd& g,
                                               const Eigen::MatrixXd& E) const {
  Eigen::MatrixXd f(g.rows(), g.cols());
  for (Eigen::Index p = 0; p < g.rows(); ++p) {
    Eigen::VectorXd M = maxwellian({E(p, 0), grid_.dim() == 2 ? E(p, 1) : 0.0},
                                   grid_);
    f.row(p) = g.row(p).cwiseProduct(M.transpose());
  }
  return f;
}

Moments FullTensorSolver::moments(const Eigen::MatrixXd& g,
                                  const Eigen::MatrixXd& E) const {
  const int d = grid_.dim();
  Moments out;
  out.rho.resize(grid_.total_nx());
  out.J.resize(grid_.total_nx(), d);
  for (Eigen::Index p = 0; p < grid_.total_nx(); ++p) {
    Eigen::VectorXd M =
        maxwellian({E(p, 0), d == 2 ? E(p, 1) : 0.0}, grid_);
    Eigen::VectorXd mg =
        grid_.v_weights().cwiseProduct(M).cwiseProduct(g.row(p).transpose());
    out.rho(p) = mg.sum();
    for (int m = 0; m < d; ++m) {
      double acc = 0.0;
      for (Eigen::Index q = 0; q < grid_.total_nv(); ++q)
        acc += mg(q) * grid_.v_coord(q)[m];
      out.J(p, m) = acc;
    }
  }
  return out;
}

void FullTensorSolver::step(Eigen::MatrixXd& g, FieldState& field) {
  const int d = grid_.dim();
  const Eigen::Index nx = grid_.total_nx();
  const Eigen::Index nv = grid_.total_nv();
  const double dt = opt_.dt;
  const double a = dt / opt_.epsilon;

  Moments mom = moments(g, field.E);
  field.rho = mom.rho;
  field.J = mom.J;
  const Eigen::MatrixXd E_old = field.E;
  field.E = ampere_step(field.E, field.J, dt);
  FieldFunctionals ff = field_functionals(E_old, field.J, grid_);

  // explicit transport v . grad_x g plus the Maxwellian-drag term
  Eigen::MatrixXd rhs(nx, nv);
#pragma omp parallel for schedule(static)
  for (Eigen::Index q = 0; q < nv; ++q) {
    auto v = grid_.v_coord(q);
    Eigen::VectorXd adv = Eigen::VectorXd::Zero(nx);
    for (int m = 0; m < d; ++m)
      add_axis_advection(g.col(q), m, v[m], grid_, dt, adv);
    for (Eigen::Index p = 0; p < nx; ++p) {
      double mcal = ff.M1(p);
      for (int m = 0; m < d; ++m)
        mcal += v[m] * ff.M2(p, m);
      for (int m = 0; m < d; ++m)
        for (int n2 = 0; n2 < d; ++n2)
          mcal += v[m] * v[n2] * ff.M3(p, m + d * n2);
      rhs(p, q) = g(p, q) - dt * (adv(p) + mcal * g(p, q));
    }
  }

  // implicit collision solve per x point, shift E^n(x)
#pragma omp parallel for schedule(static)
  for (Eigen::Index p = 0; p < nx; ++p) {
    std::array<double, 2> shift{E_old(p, 0), d == 2 ? E_old(p, 1) : 0.0};
    DiffusionStencil T(shift, grid_);
    if (d == 1) {
      g.row(p) =
          tridiagonal_collision_solve(T, a, grid_.dv(), rhs.row(p).transpose())
              .transpose();
    } else {
      std::vector<DiffusionStencil> T_ops{T};
      std::vector<Eigen::MatrixXd> estar(d, Eigen::MatrixXd::Zero(1, 1));
      g.row(p) = solve_l_system(rhs.row(p).transpose(), T_ops, estar, a, grid_,
                                *precond_, opt_.gmres)
                     .transpose();
    }
  }
}

void fluid_step(Eigen::VectorXd& rho, Eigen::MatrixXd& E, const Grid& grid,
                double dt) {
  const int d = grid.dim();
  const int n = grid.nx_per_axis();
  const Eigen::Index nx = grid.total_nx();

  Eigen::VectorXd div = Eigen::VectorXd::Zero(nx);
  Eigen::VectorXd line(n), speed(n);
  for (int m = 0; m < d; ++m) {
    const Eigen::Index nlines = nx / n;
    for (Eigen::Index l = 0; l < nlines; ++l) {
      const Eigen::Index start = m == 0 ? l * n : l;
      const Eigen::Index stride = m == 0 ? 1 : n;
      for (int p = 0; p < n; ++p) {
        line(p) = rho(start + p * stride);
        speed(p) = E(start + p * stride, m);
      }
      Eigen::VectorXd dl =
          conservative_limited_divergence(line, speed, grid.dx(), dt);
      for (int p = 0; p < n; ++p)
        div(start + p * stride) += dl(p);
    }
  }
  Eigen::MatrixXd Enew = E;
  for (int m = 0; m < d; ++m)
    Enew.col(m) -= dt * rho.cwiseProduct(E.col(m));
  rho -= dt * div;
  E = Enew;
}

} // namespace kdlr

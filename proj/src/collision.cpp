#include "kdlr/collision.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <sstream>

#include "kdlr/stencils.hpp"

namespace kdlr {

DiffusionStencil::DiffusionStencil(const std::array<double, 2>& shift,
                                   const Grid& grid, bool* boundary_warning)
    : grid_(&grid), shift_(shift) {
  const int d = grid.dim();
  const int n = grid.nv_per_axis();
  const double h = grid.dv();
  a_plus_.resize(d);
  a_minus_.resize(d);
  for (int m = 0; m < d; ++m) {
    if (boundary_warning &&
        (std::abs(shift[m] - grid.v_lo()) < 3.0 ||
         std::abs(grid.v_hi() - shift[m]) < 3.0))
      *boundary_warning = true;
    a_plus_[m].resize(n);
    a_minus_[m].resize(n);
    for (int p = 0; p < n; ++p) {
      const double u = grid.v_node(p) - shift[m];
      // M_{p±1/2}/M_p from the exponent difference; the other-axis Maxwellian
      // factors cancel in the ratio, so these stay O(1) even in the far tail.
      a_plus_[m](p) = std::exp(-0.5 * h * u - 0.125 * h * h);
      a_minus_[m](p) = std::exp(0.5 * h * u - 0.125 * h * h);
    }
    a_plus_[m](n - 1) = 0.0; // zero-flux closure
    a_minus_[m](0) = 0.0;
  }
}

void DiffusionStencil::apply(const Eigen::VectorXd& L, Eigen::VectorXd& out) const {
  const Grid& g = *grid_;
  const int d = g.dim();
  const int n = g.nv_per_axis();
  const double invh2 = 1.0 / (g.dv() * g.dv());
  out.setZero(L.size());
  for (int m = 0; m < d; ++m) {
    const Eigen::Index stride = m == 0 ? 1 : n;
    const auto& ap = a_plus_[m];
    const auto& am = a_minus_[m];
    for (Eigen::Index q = 0; q < L.size(); ++q) {
      const int p = m == 0 ? static_cast<int>(q % n) : static_cast<int>(q / n);
      double acc = 0.0;
      if (p < n - 1)
        acc += ap(p) * (L(q + stride) - L(q));
      if (p > 0)
        acc -= am(p) * (L(q) - L(q - stride));
      out(q) += acc * invh2;
    }
  }
}

Eigen::VectorXd DiffusionStencil::apply(const Eigen::VectorXd& L) const {
  Eigen::VectorXd out;
  apply(L, out);
  return out;
}

Eigen::SparseMatrix<double> DiffusionStencil::assemble_identity_minus(double a) const {
  const Grid& g = *grid_;
  const int d = g.dim();
  const int n = g.nv_per_axis();
  const double invh2 = 1.0 / (g.dv() * g.dv());
  const Eigen::Index nv = g.total_nv();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(nv * (1 + 2 * d));
  for (Eigen::Index q = 0; q < nv; ++q) {
    double diag = 1.0;
    for (int m = 0; m < d; ++m) {
      const Eigen::Index stride = m == 0 ? 1 : n;
      const int p = m == 0 ? static_cast<int>(q % n) : static_cast<int>(q / n);
      if (p < n - 1) {
        diag += a * a_plus_[m](p) * invh2;
        trip.emplace_back(q, q + stride, -a * a_plus_[m](p) * invh2);
      }
      if (p > 0) {
        diag += a * a_minus_[m](p) * invh2;
        trip.emplace_back(q, q - stride, -a * a_minus_[m](p) * invh2);
      }
    }
    trip.emplace_back(q, q, diag);
  }
  Eigen::SparseMatrix<double> mat(nv, nv);
  mat.setFromTriplets(trip.begin(), trip.end());
  return mat;
}

DiffusionStencil assemble_T(const std::array<double, 2>& shift, const Grid& grid,
                            bool* boundary_warning) {
  return DiffusionStencil(shift, grid, boundary_warning);
}

DriftStencil::DriftStencil(const std::array<double, 2>& e, const Grid& grid)
    : grid_(&grid), e_(e) {}

void DriftStencil::apply(const Eigen::VectorXd& L, Eigen::VectorXd& out) const {
  const Grid& g = *grid_;
  out.setZero(L.size());
  for (int m = 0; m < g.dim(); ++m) {
    if (e_[m] == 0.0)
      continue;
    out += e_[m] * v_derivative(L, m, g);
  }
}

Eigen::VectorXd DriftStencil::apply(const Eigen::VectorXd& L) const {
  Eigen::VectorXd out;
  apply(L, out);
  return out;
}

DriftStencil assemble_U(const std::array<double, 2>& e, const Grid& grid) {
  return DriftStencil(e, grid);
}

Eigen::MatrixXd solve_k_collision(const Eigen::MatrixXd& rhs,
                                  const std::vector<Eigen::MatrixXd>& A2,
                                  double a) {
  const Eigen::Index nx = rhs.rows();
  const Eigen::Index r = rhs.cols();
  Eigen::MatrixXd K(nx, r);
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(r, r);
  std::atomic<Eigen::Index> bad{-1};
#pragma omp parallel for schedule(static)
  for (Eigen::Index p = 0; p < nx; ++p) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(eye - a * A2[p]);
    if (!lu.isInvertible()) {
      bad = p;
      continue;
    }
    K.row(p) = lu.solve(rhs.row(p).transpose()).transpose();
  }
  if (bad >= 0) {
    std::ostringstream msg;
    msg << "solve_k_collision: singular local system at x index " << bad
        << " (dt/eps = " << a << ")";
    throw SolverError(msg.str());
  }
  return K;
}

LPreconditioner::LPreconditioner(const Grid& grid, double a)
    : a_(a), nv_(grid.total_nv()) {
  DiffusionStencil t0({0.0, 0.0}, grid);
  mat_ = t0.assemble_identity_minus(a);
  lu_.compute(mat_);
  if (lu_.info() != Eigen::Success)
    throw SolverError("LPreconditioner: factorization failed");
}

void LPreconditioner::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out,
                            int r) const {
  out.resize(in.size());
  for (int k = 0; k < r; ++k)
    out.segment(k * nv_, nv_) = lu_.solve(in.segment(k * nv_, nv_));
}

Eigen::MatrixXd solve_l_system(const Eigen::MatrixXd& rhs,
                               const std::vector<DiffusionStencil>& T_ops,
                               const std::vector<Eigen::MatrixXd>& estar,
                               double a, const Grid& grid,
                               const LPreconditioner& precond,
                               const GmresOptions& opt, GmresStats* stats) {
  const Eigen::Index nv = rhs.rows();
  const int r = static_cast<int>(rhs.cols());
  const int d = grid.dim();
  if (static_cast<int>(T_ops.size()) != r)
    throw ConfigError("solve_l_system: need one diffusion stencil per column");

  // Matvec out_i = L_i - a (T_i L_i + sum_{k != i} U_ik L_k); the column
  // gradients are shared across the i loop.
  auto apply_A = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    Eigen::Map<const Eigen::MatrixXd> L(in.data(), nv, r);
    out.resize(nv * static_cast<Eigen::Index>(r));
    Eigen::Map<Eigen::MatrixXd> W(out.data(), nv, r);
    W = L;
    Eigen::VectorXd tmp(nv);
    for (int i = 0; i < r; ++i) {
      T_ops[i].apply(L.col(i), tmp);
      W.col(i) -= a * tmp;
    }
    std::vector<Eigen::MatrixXd> grad(d);
    for (int m = 0; m < d; ++m)
      grad[m] = v_derivative(L, m, grid);
    for (int i = 0; i < r; ++i)
      for (int k = 0; k < r; ++k) {
        if (k == i)
          continue;
        for (int m = 0; m < d; ++m) {
          const double e = estar[m](i, k);
          if (e != 0.0)
            W.col(i) -= a * e * grad[m].col(k);
        }
      }
  };
  auto apply_M_inv = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    precond.apply(in, out, r);
  };

  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), nv * r);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nv * r);
  GmresStats st = gmres_solve(apply_A, apply_M_inv, b, x, opt);
  if (stats)
    *stats = st;
  return Eigen::Map<Eigen::MatrixXd>(x.data(), nv, r);
}

} // namespace kdlr

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "kdlr/errors.hpp"

namespace kdlr {

struct GmresOptions {
  double tol = 1e-10; // relative residual target
  int restart = 30;
  int max_iter = 400; // total iterations across restarts
};

struct GmresStats {
  int iterations = 0;
  double residual = 0.0; // final relative residual
};

/// Restarted GMRES with right preconditioning: solves A x = b by building the
/// Krylov space of A M^{-1}, so the Givens recurrence tracks the true residual
/// of the original system. x is taken as the initial guess. Throws SolverError
/// on non-convergence.
inline GmresStats gmres_solve(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply_A,
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply_M_inv,
    const Eigen::VectorXd& b, Eigen::VectorXd& x, const GmresOptions& opt) {
  const Eigen::Index n = b.size();
  const int m = opt.restart;
  const double bnorm = b.norm();
  GmresStats stats;
  if (bnorm == 0.0) {
    x.setZero(n);
    return stats;
  }

  Eigen::VectorXd r(n), w(n), z(n);
  Eigen::MatrixXd Vk(n, m + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  std::vector<double> cs(m), sn(m);
  Eigen::VectorXd g(m + 1);

  apply_A(x, r);
  r = b - r;
  double rnorm = r.norm();
  stats.residual = rnorm / bnorm;
  if (stats.residual <= opt.tol)
    return stats;

  while (stats.iterations < opt.max_iter) {
    Vk.col(0) = r / rnorm;
    g.setZero();
    g(0) = rnorm;

    int j = 0;
    for (; j < m && stats.iterations < opt.max_iter; ++j, ++stats.iterations) {
      apply_M_inv(Vk.col(j), z);
      apply_A(z, w);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = Vk.col(i).dot(w);
        w -= H(i, j) * Vk.col(i);
      }
      H(j + 1, j) = w.norm();
      if (H(j + 1, j) > 0.0)
        Vk.col(j + 1) = w / H(j + 1, j);

      // apply stored rotations, then the new one
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = denom == 0.0 ? 1.0 : H(j, j) / denom;
      sn[j] = denom == 0.0 ? 0.0 : H(j + 1, j) / denom;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn[j] * g(j);
      g(j) = cs[j] * g(j);

      stats.residual = std::abs(g(j + 1)) / bnorm;
      if (stats.residual <= opt.tol) {
        ++j;
        ++stats.iterations;
        break;
      }
    }

    // back substitution and solution update in the unpreconditioned space
    Eigen::VectorXd y(j);
    for (int i = j - 1; i >= 0; --i) {
      double s = g(i);
      for (int k = i + 1; k < j; ++k)
        s -= H(i, k) * y(k);
      y(i) = s / H(i, i);
    }
    apply_M_inv(Vk.leftCols(j) * y, z);
    x += z;

    apply_A(x, r);
    r = b - r;
    rnorm = r.norm();
    stats.residual = rnorm / bnorm;
    if (stats.residual <= opt.tol)
      return stats;
  }

  std::ostringstream msg;
  msg << "gmres: no convergence after " << stats.iterations
      << " iterations, relative residual " << stats.residual;
  throw SolverError(msg.str());
}

} // namespace kdlr

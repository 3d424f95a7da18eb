#include "kdlr/transport.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace kdlr {

FluxEigensystem eigendecompose_flux(const std::vector<Eigen::MatrixXd>& c1) {
  FluxEigensystem eig;
  eig.T.reserve(c1.size());
  eig.lambda.reserve(c1.size());
  for (const auto& c : c1) {
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-8)
      throw ConfigError("eigendecompose_flux: flux matrix is not symmetric");
    Eigen::MatrixXd sym = 0.5 * (c + c.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    Eigen::MatrixXd T = es.eigenvectors(); // eigenvalues ascending
    for (Eigen::Index j = 0; j < T.cols(); ++j) {
      for (Eigen::Index i = 0; i < T.rows(); ++i) {
        if (std::abs(T(i, j)) > 1e-14) {
          if (T(i, j) < 0.0)
            T.col(j) = -T.col(j);
          break;
        }
      }
    }
    eig.T.push_back(std::move(T));
    eig.lambda.push_back(es.eigenvalues());
  }
  return eig;
}

double van_leer(double theta) {
  return (std::abs(theta) + theta) / (1.0 + std::abs(theta));
}

namespace {

inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Interface fluxes for one periodic line. flux[h] lives between cells h and
// h+1. Elements are accessed through a getter so both axes of a tensor grid
// share one code path.
template <class Get>
void limited_fluxes(int n, double dx, double dt, Get khat,
                    const std::vector<double>& speed, std::vector<double>& flux) {
  std::vector<double> delta(n);
  for (int h = 0; h < n; ++h)
    delta[h] = khat((h + 1) % n) - khat(h);

  for (int h = 0; h < n; ++h) {
    const double lam = speed[h];
    const int sg = sign_of(lam);
    double F = 0.5 * lam * (khat((h + 1) % n) + khat(h)) -
               0.5 * std::abs(lam) * delta[h];
    // Van Leer limited Lax-Wendroff correction; pure upwind at flat gradients.
    if (std::abs(delta[h]) >= 1e-14) {
      const double up = delta[(h - sg + n) % n];
      const double phi = van_leer(up / delta[h]);
      F += 0.5 * phi * (sg - lam * dt / dx) * lam * delta[h];
    }
    flux[h] = F;
  }
}

} // namespace

Eigen::VectorXd limited_derivative(const Eigen::VectorXd& khat, double lambda,
                                   double dx, double dt) {
  const int n = static_cast<int>(khat.size());
  std::vector<double> flux(n);
  std::vector<double> speed(n, lambda);
  limited_fluxes(n, dx, dt, [&](int i) { return khat(i); }, speed, flux);
  Eigen::VectorXd out(n);
  for (int p = 0; p < n; ++p)
    out(p) = (flux[p] - flux[(p - 1 + n) % n]) / dx;
  return out;
}

Eigen::VectorXd conservative_limited_divergence(const Eigen::VectorXd& u,
                                                const Eigen::VectorXd& speed,
                                                double dx, double dt) {
  const int n = static_cast<int>(u.size());
  std::vector<double> flux(n);
  std::vector<double> s(n);
  for (int h = 0; h < n; ++h)
    s[h] = 0.5 * (speed(h) + speed((h + 1) % n));
  limited_fluxes(n, dx, dt, [&](int i) { return u(i); }, s, flux);
  Eigen::VectorXd out(n);
  for (int p = 0; p < n; ++p)
    out(p) = (flux[p] - flux[(p - 1 + n) % n]) / dx;
  return out;
}

Eigen::MatrixXd k_transport_rhs(const Eigen::MatrixXd& K,
                                const FluxEigensystem& eig,
                                const std::vector<Eigen::MatrixXd>& A1,
                                const Grid& grid, double dt,
                                bool* cfl_exceeded) {
  const int d = grid.dim();
  const int n = grid.nx_per_axis();
  const Eigen::Index nx = grid.total_nx();
  const Eigen::Index r = K.cols();
  const double dx = grid.dx();

  if (cfl_exceeded) {
    double lmax = 0.0;
    for (int m = 0; m < d; ++m)
      lmax = std::max(lmax, eig.lambda[m].cwiseAbs().maxCoeff());
    *cfl_exceeded = lmax * dt / dx > 1.0 + 1e-12;
  }

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nx, r);
  std::vector<double> flux(n);
  for (int m = 0; m < d; ++m) {
    Eigen::MatrixXd khat = K * eig.T[m]; // rows are per-point coefficient vectors
    Eigen::MatrixXd dhat(nx, r);
    for (Eigen::Index i = 0; i < r; ++i) {
      const double lam = eig.lambda[m](i);
      std::vector<double> speed(n, lam);
      const Eigen::Index nlines = nx / n;
      for (Eigen::Index line = 0; line < nlines; ++line) {
        const Eigen::Index start = m == 0 ? line * n : line;
        const Eigen::Index stride = m == 0 ? 1 : n;
        limited_fluxes(
            n, dx, dt, [&](int s) { return khat(start + s * stride, i); },
            speed, flux);
        for (int p = 0; p < n; ++p)
          dhat(start + p * stride, i) =
              (flux[p] - flux[(p - 1 + n) % n]) / dx;
      }
    }
    rhs.noalias() -= dhat * eig.T[m].transpose();
  }
  for (Eigen::Index p = 0; p < nx; ++p)
    rhs.row(p) -= K.row(p) * A1[p].transpose();
  return rhs;
}

} // namespace kdlr

#include "kdlr/field.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "fft_util.hpp"
#include "kdlr/stencils.hpp"

namespace kdlr {

namespace {

// Eigenvalue of the centered first derivative on a periodic grid, i*sin(k h)/h.
// The Nyquist mode is dropped (its centered derivative is identically zero).
double modified_wavenumber(int idx, int n, double length) {
  int f = idx <= n / 2 ? idx : idx - n;
  if (n % 2 == 0 && idx == n / 2)
    return 0.0;
  const double h = length / n;
  return std::sin(2.0 * M_PI * f * h / length) / h;
}

} // namespace

PoissonResult solve_poisson(const Eigen::VectorXd& rho, const Eigen::VectorXd& eta,
                            const Grid& grid) {
  const Eigen::Index nx = grid.total_nx();
  if (rho.size() != nx || eta.size() != nx)
    throw ConfigError("solve_poisson: source shape mismatch");

  PoissonResult res;
  res.eta = eta;
  const double rho_sum = rho.sum();
  const double eta_sum = eta.sum();
  if (std::abs(rho_sum - eta_sum) > 1e-10 * std::max(1.0, std::abs(rho_sum))) {
    if (eta_sum == 0.0)
      throw ConfigError("solve_poisson: cannot neutralize zero background");
    res.eta_scale = rho_sum / eta_sum;
    res.eta *= res.eta_scale;
  }

  Eigen::VectorXd src = rho - res.eta;
  const int d = grid.dim();
  const int n = grid.nx_per_axis();
  const double L = grid.x_hi() - grid.x_lo();

  detail::RealFFT fft(n, d == 2 ? n : 0);
  std::vector<std::complex<double>> hat(fft.n_complex());
  fft.forward(src.data(), hat.data());

  res.E.resize(nx, d);
  const int n1c = d == 2 ? n / 2 + 1 : n / 2 + 1;
  std::vector<std::complex<double>> comp(fft.n_complex());
  const std::complex<double> I(0.0, 1.0);
  // Invert the composition of centered divergence and centered gradient, so
  // that div(E) reproduces the source exactly on its range. Modes the centered
  // gradient cannot see (mean and Nyquist) are projected out.
  for (int m = 0; m < d; ++m) {
    for (long idx = 0; idx < fft.n_complex(); ++idx) {
      // Row-major complex layout: slow index i0 over axis 1, fast i1 over axis 0.
      int i1 = static_cast<int>(idx % n1c);
      int i0 = static_cast<int>(idx / n1c);
      double k0 = modified_wavenumber(i1, n, L);
      double k1 = d == 2 ? modified_wavenumber(i0, n, L) : 0.0;
      double lam = k0 * k0 + k1 * k1;
      if (lam == 0.0) {
        comp[idx] = 0.0;
        continue;
      }
      double km = m == 0 ? k0 : k1;
      comp[idx] = -I * km * hat[idx] / lam;
    }
    Eigen::VectorXd col(nx);
    fft.backward(comp.data(), col.data());
    res.E.col(m) = col / static_cast<double>(nx);
  }
  return res;
}

Eigen::MatrixXd ampere_step(const Eigen::MatrixXd& E, const Eigen::MatrixXd& J,
                            double dt) {
  if (E.rows() != J.rows() || E.cols() != J.cols())
    throw ConfigError("ampere_step: shape mismatch");
  return E - dt * J;
}

double gauss_residual(const Eigen::MatrixXd& E, const Eigen::VectorXd& rho,
                      const Eigen::VectorXd& eta, const Grid& grid) {
  const int d = grid.dim();
  Eigen::VectorXd div = Eigen::VectorXd::Zero(E.rows());
  for (int m = 0; m < d; ++m)
    div += x_derivative(E.col(m), m, grid);
  return (div - (rho - eta)).cwiseAbs().sum() * grid.x_weight();
}

FieldFunctionals field_functionals(const Eigen::MatrixXd& E,
                                   const Eigen::MatrixXd& J, const Grid& grid) {
  const int d = grid.dim();
  FieldFunctionals ff;
  ff.M1 = (E.array() * J.array()).rowwise().sum();
  Eigen::VectorXd e2 = E.array().square().rowwise().sum();
  ff.M2 = -J;
  for (int m = 0; m < d; ++m)
    ff.M2.col(m) -= 0.5 * x_derivative(e2, m, grid);
  ff.M3.resize(E.rows(), d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      ff.M3.col(i + d * j) = x_derivative(E.col(i), j, grid);
  return ff;
}

} // namespace kdlr

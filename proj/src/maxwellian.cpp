#include "kdlr/maxwellian.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "fft_util.hpp"

namespace kdlr {

Eigen::VectorXd maxwellian(const std::array<double, 2>& center, const Grid& grid) {
  const int d = grid.dim();
  const double norm = std::pow(2.0 * M_PI, -0.5 * d);
  Eigen::VectorXd M(grid.total_nv());
  for (Eigen::Index q = 0; q < grid.total_nv(); ++q) {
    auto v = grid.v_coord(q);
    double e2 = 0.0;
    for (int m = 0; m < d; ++m) {
      const double dvm = v[m] - center[m];
      e2 += dvm * dvm;
    }
    M(q) = norm * std::exp(-0.5 * e2);
  }
  return M;
}

struct MomentConvolver::Impl {
  int pad;                                     // padded length per axis (2 nv)
  std::unique_ptr<detail::RealFFT> fft;
  std::vector<std::complex<double>> kernel_hat;
  mutable std::vector<double> rbuf;
  mutable std::vector<std::complex<double>> cbuf;
};

MomentConvolver::MomentConvolver(const Grid& grid)
    : grid_(grid), impl_(std::make_unique<Impl>()) {
  const int nv = grid.nv_per_axis();
  const int d = grid.dim();
  impl_->pad = 2 * nv;
  const int P = impl_->pad;
  impl_->fft = std::make_unique<detail::RealFFT>(P, d == 2 ? P : 0);
  impl_->rbuf.assign(impl_->fft->n_real(), 0.0);
  impl_->cbuf.resize(impl_->fft->n_complex());
  impl_->kernel_hat.resize(impl_->fft->n_complex());

  // Gaussian kernel samples at signed node offsets, wrapped into the padded
  // circle. Offsets never exceed nv - 1 in magnitude, so the circular product
  // below is an exact linear convolution.
  auto kernel1d = [&](int m) {
    const int off = m <= P / 2 ? m : m - P;
    const double s = off * grid.dv();
    return std::exp(-0.5 * s * s);
  };
  if (d == 1) {
    for (int m = 0; m < P; ++m)
      impl_->rbuf[m] = kernel1d(m);
  } else {
    for (int m1 = 0; m1 < P; ++m1)
      for (int m0 = 0; m0 < P; ++m0)
        impl_->rbuf[static_cast<long>(m1) * P + m0] = kernel1d(m1) * kernel1d(m0);
  }
  impl_->fft->forward(impl_->rbuf.data(), impl_->kernel_hat.data());
}

MomentConvolver::~MomentConvolver() = default;

MomentTable MomentConvolver::moment_convolution(const Eigen::MatrixXd& V,
                                                int weight_axis) const {
  const int d = grid_.dim();
  const int nv = grid_.nv_per_axis();
  const int P = impl_->pad;
  if (V.rows() != grid_.total_nv())
    throw ConfigError("moment_convolution: V shape mismatch");
  if (weight_axis < -1 || weight_axis >= d)
    throw ConfigError("moment_convolution: bad weight axis");

  MomentTable table;
  table.weight_axis = weight_axis;
  table.ell.resize(grid_.total_nv(), V.cols());
  const Eigen::VectorXd& w = grid_.v_weights();

  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    std::fill(impl_->rbuf.begin(), impl_->rbuf.end(), 0.0);
    for (Eigen::Index q = 0; q < grid_.total_nv(); ++q) {
      auto mi = grid_.v_multi(q);
      double val = w(q) * V(q, j);
      if (weight_axis >= 0)
        val *= grid_.v_node(mi[weight_axis]);
      long idx = d == 2 ? static_cast<long>(mi[1]) * P + mi[0] : mi[0];
      impl_->rbuf[idx] = val;
    }
    impl_->fft->forward(impl_->rbuf.data(), impl_->cbuf.data());
    for (long i = 0; i < impl_->fft->n_complex(); ++i)
      impl_->cbuf[i] *= impl_->kernel_hat[i];
    impl_->fft->backward(impl_->cbuf.data(), impl_->rbuf.data());
    const double scale = 1.0 / static_cast<double>(impl_->fft->n_real());
    for (Eigen::Index q = 0; q < grid_.total_nv(); ++q) {
      auto mi = grid_.v_multi(q);
      long idx = d == 2 ? static_cast<long>(mi[1]) * P + mi[0] : mi[0];
      table.ell(q, j) = impl_->rbuf[idx] * scale;
    }
  }
  return table;
}

Eigen::MatrixXd MomentConvolver::evaluate_at_field(const MomentTable& table,
                                                   const Eigen::MatrixXd& E) const {
  const int d = grid_.dim();
  const int nv = grid_.nv_per_axis();
  const double norm = std::pow(2.0 * M_PI, -0.5 * d);
  Eigen::MatrixXd I(E.rows(), table.ell.cols());

  // Per-axis cell location plus interpolation fraction.
  auto locate = [&](double z, Eigen::Index p, int axis) {
    if (z < grid_.v_lo() || z > grid_.v_hi()) {
      std::ostringstream msg;
      msg << "evaluate_at_field: E(" << p << ")[" << axis << "] = " << z
          << " outside the tabulated range [" << grid_.v_lo() << ", "
          << grid_.v_hi() << "]; enlarge the v-domain";
      throw SolverError(msg.str());
    }
    double s = (z - grid_.v_lo()) / grid_.dv();
    int i0 = static_cast<int>(std::floor(s));
    if (i0 > nv - 2)
      i0 = nv - 2;
    if (i0 < 0)
      i0 = 0;
    return std::pair<int, double>(i0, s - i0);
  };

  for (Eigen::Index p = 0; p < E.rows(); ++p) {
    auto [i0, t0] = locate(E(p, 0), p, 0);
    if (d == 1) {
      for (Eigen::Index j = 0; j < table.ell.cols(); ++j)
        I(p, j) = norm * ((1.0 - t0) * table.ell(i0, j) +
                          t0 * table.ell(i0 + 1, j));
    } else {
      auto [i1, t1] = locate(E(p, 1), p, 1);
      const Eigen::Index q00 = grid_.v_index(i0, i1);
      const Eigen::Index q10 = grid_.v_index(i0 + 1, i1);
      const Eigen::Index q01 = grid_.v_index(i0, i1 + 1);
      const Eigen::Index q11 = grid_.v_index(i0 + 1, i1 + 1);
      for (Eigen::Index j = 0; j < table.ell.cols(); ++j) {
        double a = (1.0 - t0) * table.ell(q00, j) + t0 * table.ell(q10, j);
        double b = (1.0 - t0) * table.ell(q01, j) + t0 * table.ell(q11, j);
        I(p, j) = norm * ((1.0 - t1) * a + t1 * b);
      }
    }
  }
  return I;
}

Moments macroscopic_moments(const LowRankState& state, const Eigen::MatrixXd& E,
                            const Grid& grid, const MomentConvolver& conv) {
  const int d = grid.dim();
  Eigen::MatrixXd K = state.X * state.S; // Nx x r

  Moments out;
  MomentTable t1 = conv.moment_convolution(state.V, -1);
  Eigen::MatrixXd I1 = conv.evaluate_at_field(t1, E);
  out.rho = (K.array() * I1.array()).rowwise().sum();

  out.J.resize(grid.total_nx(), d);
  for (int m = 0; m < d; ++m) {
    MomentTable tv = conv.moment_convolution(state.V, m);
    Eigen::MatrixXd Iv = conv.evaluate_at_field(tv, E);
    out.J.col(m) = (K.array() * Iv.array()).rowwise().sum();
  }
  return out;
}

} // namespace kdlr

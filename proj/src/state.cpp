#include "kdlr/state.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

namespace kdlr {

namespace {

QRFactors weighted_qr(const Eigen::MatrixXd& factor, const Eigen::VectorXd& sqrt_w) {
  const Eigen::Index n = factor.rows();
  const Eigen::Index r = factor.cols();
  Eigen::MatrixXd B = sqrt_w.asDiagonal() * factor;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
  Eigen::MatrixXd R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  // Sign convention: non-negative R diagonal, for reproducibility.
  for (Eigen::Index i = 0; i < r; ++i) {
    if (R(i, i) < 0.0) {
      R.row(i) = -R.row(i);
      Q.col(i) = -Q.col(i);
    }
  }
  Q.array().colwise() /= sqrt_w.array();
  return {std::move(Q), std::move(R)};
}

} // namespace

QRFactors reorthonormalize(const Eigen::MatrixXd& factor,
                           const Eigen::VectorXd& weights) {
  if (weights.size() != factor.rows())
    throw ConfigError("reorthonormalize: weight length mismatch");
  if ((weights.array() <= 0.0).any())
    throw ConfigError("reorthonormalize: weights must be positive");
  return weighted_qr(factor, weights.array().sqrt().matrix());
}

QRFactors reorthonormalize(const Eigen::MatrixXd& factor, double weight) {
  if (!(weight > 0.0))
    throw ConfigError("reorthonormalize: weight must be positive");
  Eigen::VectorXd sqrt_w =
      Eigen::VectorXd::Constant(factor.rows(), std::sqrt(weight));
  return weighted_qr(factor, sqrt_w);
}

LowRankState init_from_samples(const Eigen::MatrixXd& g0, int r, const Grid& grid) {
  if (g0.rows() != grid.total_nx() || g0.cols() != grid.total_nv())
    throw ConfigError("init_from_samples: sample shape does not match grid");
  if (r < 1 || r > std::min(g0.rows(), g0.cols()))
    throw ConfigError("init_from_samples: rank out of range");

  const double sx = std::sqrt(grid.x_weight());
  Eigen::VectorXd sv = grid.v_weights().array().sqrt();
  Eigen::MatrixXd B = sx * g0 * sv.asDiagonal();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  LowRankState st;
  st.X = svd.matrixU().leftCols(r) / sx;
  st.V = svd.matrixV().leftCols(r).array().colwise() / sv.array();
  st.S = svd.singularValues().head(r).asDiagonal();
  return st;
}

Eigen::MatrixXd reconstruct_g(const LowRankState& state) {
  return state.X * state.S * state.V.transpose();
}

Eigen::MatrixXd reconstruct_f(const LowRankState& state, const Eigen::MatrixXd& E,
                              const Grid& grid) {
  const Eigen::Index nx = grid.total_nx();
  const Eigen::Index nv = grid.total_nv();
  const int d = grid.dim();
  const double norm = std::pow(2.0 * M_PI, -0.5 * d);
  Eigen::MatrixXd f(nx, nv);
  Eigen::RowVectorXd grow(nv);
  for (Eigen::Index p = 0; p < nx; ++p) {
    grow.noalias() = state.X.row(p) * state.S * state.V.transpose();
    for (Eigen::Index q = 0; q < nv; ++q) {
      auto v = grid.v_coord(q);
      double e2 = 0.0;
      for (int m = 0; m < d; ++m) {
        const double dvm = v[m] - E(p, m);
        e2 += dvm * dvm;
      }
      f(p, q) = norm * std::exp(-0.5 * e2) * grow(q);
    }
  }
  return f;
}

Eigen::VectorXd singular_values(const LowRankState& state) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(state.S);
  return svd.singularValues();
}

double orthonormality_residual(const Eigen::MatrixXd& factor,
                               const Eigen::VectorXd& weights) {
  Eigen::MatrixXd G = factor.transpose() * weights.asDiagonal() * factor;
  G -= Eigen::MatrixXd::Identity(factor.cols(), factor.cols());
  return G.cwiseAbs().maxCoeff();
}

double orthonormality_residual(const Eigen::MatrixXd& factor, double weight) {
  Eigen::MatrixXd G = weight * (factor.transpose() * factor);
  G -= Eigen::MatrixXd::Identity(factor.cols(), factor.cols());
  return G.cwiseAbs().maxCoeff();
}

} // namespace kdlr

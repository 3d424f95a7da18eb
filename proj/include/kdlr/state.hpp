#pragma once

#include <Eigen/Core>

#include "kdlr/grid.hpp"

namespace kdlr {

/// Low-rank factorization g ~ X S V^T. Columns of X are orthonormal in the
/// dx-weighted inner product, columns of V in the trapezoid dv-weighted one,
/// i.e. factors carry continuum normalization so discrete inner products match
/// the integral notation directly.
struct LowRankState {
  Eigen::MatrixXd X; // Nx x r
  Eigen::MatrixXd S; // r x r
  Eigen::MatrixXd V; // Nv x r

  int rank() const { return static_cast<int>(S.rows()); }
};

struct QRFactors {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
};

/// Weighted thin QR of a tall factor: Q^T diag(w) Q = I, Q R = factor,
/// R upper triangular with non-negative diagonal. Rank-deficient inputs yield
/// zero rows in R and an arbitrary orthonormal completion in Q.
QRFactors reorthonormalize(const Eigen::MatrixXd& factor,
                           const Eigen::VectorXd& weights);
QRFactors reorthonormalize(const Eigen::MatrixXd& factor, double weight);

/// Truncated rank-r SVD of samples of g0 on the phase-space grid, scaled so
/// the factors are orthonormal under the weighted inner products. Runs a dense
/// SVD; meant for setup only.
LowRankState init_from_samples(const Eigen::MatrixXd& g0, int r, const Grid& grid);

/// X S V^T (no Maxwellian weight).
Eigen::MatrixXd reconstruct_g(const LowRankState& state);

/// f = M * (X S V^T) with M the local Maxwellian centered at E(x). E is Nx x d.
Eigen::MatrixXd reconstruct_f(const LowRankState& state, const Eigen::MatrixXd& E,
                              const Grid& grid);

/// Singular values of S, descending.
Eigen::VectorXd singular_values(const LowRankState& state);

/// max |Q^T diag(w) Q - I|, the factor orthonormality residual.
double orthonormality_residual(const Eigen::MatrixXd& factor,
                               const Eigen::VectorXd& weights);
double orthonormality_residual(const Eigen::MatrixXd& factor, double weight);

} // namespace kdlr

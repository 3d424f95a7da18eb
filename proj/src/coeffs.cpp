#include "kdlr/coeffs.hpp"

#include "kdlr/stencils.hpp"

namespace kdlr {

namespace {

// Weighted Gram matrix A^T diag(w) B.
Eigen::MatrixXd wgram(const Eigen::MatrixXd& A, const Eigen::VectorXd& w,
                      const Eigen::MatrixXd& B) {
  return A.transpose() * w.asDiagonal() * B;
}

} // namespace

VelocityCoeffs velocity_inner_products(const Eigen::MatrixXd& V, const Grid& grid) {
  const int d = grid.dim();
  const Eigen::Index nv = grid.total_nv();
  if (V.rows() != nv)
    throw ConfigError("velocity_inner_products: V shape mismatch");
  const Eigen::VectorXd& w = grid.v_weights();

  // per-axis node values over the tensor grid
  std::vector<Eigen::VectorXd> vm(d);
  for (int m = 0; m < d; ++m) {
    vm[m].resize(nv);
    for (Eigen::Index q = 0; q < nv; ++q)
      vm[m](q) = grid.v_coord(q)[m];
  }

  VelocityCoeffs vc;
  vc.c1.resize(d);
  vc.c2.resize(d * d);
  for (int m = 0; m < d; ++m)
    vc.c1[m] = wgram(V, (w.array() * vm[m].array()).matrix(), V);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      vc.c2[m + d * n] =
          wgram(V, (w.array() * vm[m].array() * vm[n].array()).matrix(), V);

  std::vector<Eigen::MatrixXd> grad(d);
  for (int m = 0; m < d; ++m)
    grad[m] = v_derivative(V, m, grid);

  vc.d2.resize(d);
  for (int m = 0; m < d; ++m)
    vc.d2[m] = wgram(V, w, grad[m]);

  // (grad_v - v) . grad_v V = sum_m ( d^2/dv_m^2 - v_m d/dv_m ) V, with the
  // discrete operator applied to V directly (no integration by parts).
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(nv, V.cols());
  for (int m = 0; m < d; ++m) {
    op += v_second_derivative(V, m, grid);
    op -= vm[m].asDiagonal() * grad[m];
  }
  vc.d1 = wgram(V, w, op);
  return vc;
}

KStepMatrices k_matrices(const VelocityCoeffs& vc, const FieldFunctionals& ff,
                         const Eigen::MatrixXd& E) {
  const int d = static_cast<int>(E.cols());
  const Eigen::Index nx = E.rows();
  const Eigen::Index r = vc.d1.rows();

  KStepMatrices km;
  km.A1.assign(nx, Eigen::MatrixXd(r, r));
  km.A2.assign(nx, Eigen::MatrixXd(r, r));
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(r, r);
  for (Eigen::Index p = 0; p < nx; ++p) {
    Eigen::MatrixXd a1 = ff.M1(p) * eye;
    for (int m = 0; m < d; ++m)
      a1 += ff.M2(p, m) * vc.c1[m];
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n)
        a1 += ff.M3(p, m + d * n) * vc.c2[m + d * n];
    km.A1[p] = a1;

    Eigen::MatrixXd a2 = vc.d1;
    for (int m = 0; m < d; ++m)
      a2 += E(p, m) * vc.d2[m];
    km.A2[p] = a2;
  }
  return km;
}

SpaceCoeffs space_inner_products(const Eigen::MatrixXd& X,
                                 const FieldFunctionals& ff,
                                 const Eigen::MatrixXd& E, const Grid& grid) {
  const int d = grid.dim();
  if (X.rows() != grid.total_nx())
    throw ConfigError("space_inner_products: X shape mismatch");
  const Eigen::VectorXd w =
      Eigen::VectorXd::Constant(grid.total_nx(), grid.x_weight());

  SpaceCoeffs sc;
  sc.cstar = wgram(X, (w.array() * ff.M1.array()).matrix(), X);
  sc.cstarstar.resize(d);
  sc.estar.resize(d);
  for (int m = 0; m < d; ++m) {
    sc.cstarstar[m] = wgram(X, (w.array() * ff.M2.col(m).array()).matrix(), X);
    sc.estar[m] = wgram(X, (w.array() * E.col(m).array()).matrix(), X);
  }
  sc.cstar3.resize(d * d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      sc.cstar3[m + d * n] =
          wgram(X, (w.array() * ff.M3.col(m + d * n).array()).matrix(), X);
  sc.dstar.resize(d);
  for (int m = 0; m < d; ++m)
    sc.dstar[m] = wgram(X, w, x_derivative(X, m, grid));
  return sc;
}

STensors s_tensors(const VelocityCoeffs& vc, const SpaceCoeffs& sc) {
  const int r = static_cast<int>(vc.d1.rows());
  const int d = static_cast<int>(vc.c1.size());
  STensors st;
  st.B1.resize(r * r, r * r);
  st.B2.resize(r * r, r * r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k)
        for (int l = 0; l < r; ++l) {
          // c~_{ij;kl} = delta_jl cstar_ik + c1_jl . cstarstar_ik
          //            + c2_jl : cstar3_ik
          double ct = j == l ? sc.cstar(i, k) : 0.0;
          for (int m = 0; m < d; ++m)
            ct += vc.c1[m](j, l) * sc.cstarstar[m](i, k);
          for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n)
              ct += vc.c2[m + d * n](j, l) * sc.cstar3[m + d * n](i, k);

          double b1 = ct;
          for (int m = 0; m < d; ++m)
            b1 += sc.dstar[m](i, k) * vc.c1[m](j, l);

          double b2 = i == k ? vc.d1(j, l) : 0.0;
          for (int m = 0; m < d; ++m)
            b2 += sc.estar[m](i, k) * vc.d2[m](j, l);

          st.B1(i * r + j, k * r + l) = b1;
          st.B2(i * r + j, k * r + l) = b2;
        }
  return st;
}

std::vector<Eigen::MatrixXd> l_matrix(const SpaceCoeffs& sc, const Grid& grid) {
  const int d = grid.dim();
  std::vector<Eigen::MatrixXd> chat(grid.total_nv());
  for (Eigen::Index q = 0; q < grid.total_nv(); ++q) {
    auto v = grid.v_coord(q);
    Eigen::MatrixXd c = sc.cstar;
    for (int m = 0; m < d; ++m)
      c += v[m] * sc.cstarstar[m];
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n)
        c += v[m] * v[n] * sc.cstar3[m + d * n];
    chat[q] = std::move(c);
  }
  return chat;
}

} // namespace kdlr

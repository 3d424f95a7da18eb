#pragma once

#include <vector>

#include <Eigen/Core>

#include "kdlr/field.hpp"
#include "kdlr/grid.hpp"

namespace kdlr {

/// Velocity-basis inner products feeding the K, S and L equations:
///   c1[m](j,l)      = <v_m V_j V_l>_v
///   c2[m + d*n](j,l) = <v_m v_n V_j V_l>_v
///   d1(j,l)          = <V_j (grad_v - v) . grad_v V_l>_v
///   d2[m](j,l)       = <V_j d/dv_m V_l>_v
/// Quadrature is the trapezoid rule; derivatives are centered with one-sided
/// second-order stencils at the v-bounds.
struct VelocityCoeffs {
  std::vector<Eigen::MatrixXd> c1;
  std::vector<Eigen::MatrixXd> c2;
  Eigen::MatrixXd d1;
  std::vector<Eigen::MatrixXd> d2;
};

/// Spatial-basis inner products against the field functionals (rectangle rule
/// on the periodic x-grid):
///   cstar(i,k)        = <X_i X_k M1>_x
///   cstarstar[m](i,k) = <X_i X_k M2_m>_x
///   cstar3[m+d*n](i,k)= <X_i X_k (M3)_{mn}>_x
///   dstar[m](i,k)     = <X_i d/dx_m X_k>_x
///   estar[m](i,k)     = <X_i X_k E_m>_x
struct SpaceCoeffs {
  Eigen::MatrixXd cstar;
  std::vector<Eigen::MatrixXd> cstarstar;
  std::vector<Eigen::MatrixXd> cstar3;
  std::vector<Eigen::MatrixXd> dstar;
  std::vector<Eigen::MatrixXd> estar;
};

/// Per-point matrices of the K equation:
///   A1[p](j,l) = delta_jl M1(p) + c1_jl . M2(p) + c2_jl : M3(p)
///   A2[p](j,l) = d1(j,l) + E(p) . d2(j,l)
struct KStepMatrices {
  std::vector<Eigen::MatrixXd> A1;
  std::vector<Eigen::MatrixXd> A2;
};

/// Order-four tensors of the S equation flattened to r^2 x r^2 with row index
/// i*r + j and column index k*r + l, so that flat(S') = B * flat(S).
struct STensors {
  Eigen::MatrixXd B1;
  Eigen::MatrixXd B2;
};

VelocityCoeffs velocity_inner_products(const Eigen::MatrixXd& V, const Grid& grid);

KStepMatrices k_matrices(const VelocityCoeffs& vc, const FieldFunctionals& ff,
                         const Eigen::MatrixXd& E);

SpaceCoeffs space_inner_products(const Eigen::MatrixXd& X,
                                 const FieldFunctionals& ff,
                                 const Eigen::MatrixXd& E, const Grid& grid);

STensors s_tensors(const VelocityCoeffs& vc, const SpaceCoeffs& sc);

/// chat(v_q) = cstar + v . cstarstar + (v x v) : cstar3, one r x r matrix per
/// v node.
std::vector<Eigen::MatrixXd> l_matrix(const SpaceCoeffs& sc, const Grid& grid);

} // namespace kdlr

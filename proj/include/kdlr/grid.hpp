#pragma once

#include <array>
#include <Eigen/Core>

#include "kdlr/errors.hpp"

namespace kdlr {

/// Uniform tensor-product phase-space grid.
///
/// The x-box is periodic and stores no duplicate endpoint (node count equals
/// cell count), so dx = (x_hi - x_lo)/nx. The v-box is truncated and includes
/// both endpoints, dv = (v_hi - v_lo)/(nv - 1); boundary handling of the
/// velocity operators is left to the collision stencils (zero flux).
///
/// Linear indices run with axis 0 fastest: p = i0 + nx*i1, q = j0 + nv*j1.
/// Immutable after construction; concurrent reads are safe.
class Grid {
public:
  Grid(int d, double x_lo, double x_hi, int nx_per_axis, double v_lo,
       double v_hi, int nv_per_axis);

  int dim() const { return d_; }
  int nx_per_axis() const { return nx_; }
  int nv_per_axis() const { return nv_; }
  Eigen::Index total_nx() const { return total_nx_; }
  Eigen::Index total_nv() const { return total_nv_; }

  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }
  double v_lo() const { return v_lo_; }
  double v_hi() const { return v_hi_; }
  double dx() const { return dx_; }
  double dv() const { return dv_; }

  double x_node(int i) const { return x_lo_ + i * dx_; }
  double v_node(int i) const { return v_lo_ + i * dv_; }

  Eigen::Index x_index(int i0, int i1 = 0) const {
    return i0 + static_cast<Eigen::Index>(nx_) * i1;
  }
  Eigen::Index v_index(int j0, int j1 = 0) const {
    return j0 + static_cast<Eigen::Index>(nv_) * j1;
  }
  std::array<int, 2> x_multi(Eigen::Index p) const {
    return {static_cast<int>(p % nx_), static_cast<int>(p / nx_)};
  }
  std::array<int, 2> v_multi(Eigen::Index q) const {
    return {static_cast<int>(q % nv_), static_cast<int>(q / nv_)};
  }
  std::array<double, 2> x_coord(Eigen::Index p) const {
    auto m = x_multi(p);
    return {x_node(m[0]), d_ == 2 ? x_node(m[1]) : 0.0};
  }
  std::array<double, 2> v_coord(Eigen::Index q) const {
    auto m = v_multi(q);
    return {v_node(m[0]), d_ == 2 ? v_node(m[1]) : 0.0};
  }

  /// Quadrature weight of every x node (rectangle rule on the periodic box): dx^d.
  double x_weight() const { return x_weight_; }
  /// Trapezoid quadrature weights over the full v grid, dv^d included.
  const Eigen::VectorXd& v_weights() const { return v_weights_; }

  /// dt = cfl * dx / v_max (the spacing is shared by all axes).
  double cfl_timestep(double v_max, double cfl) const;

private:
  int d_;
  double x_lo_, x_hi_, v_lo_, v_hi_;
  int nx_, nv_;
  double dx_, dv_;
  Eigen::Index total_nx_, total_nv_;
  double x_weight_;
  Eigen::VectorXd v_weights_;
};

} // namespace kdlr

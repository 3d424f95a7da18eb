#include "kdlr/grid.hpp"

namespace kdlr {

Grid::Grid(int d, double x_lo, double x_hi, int nx_per_axis, double v_lo,
           double v_hi, int nv_per_axis)
    : d_(d), x_lo_(x_lo), x_hi_(x_hi), v_lo_(v_lo), v_hi_(v_hi),
      nx_(nx_per_axis), nv_(nv_per_axis) {
  if (d != 1 && d != 2)
    throw ConfigError("grid: dimension must be 1 or 2");
  if (nx_ < 4 || nv_ < 4)
    throw ConfigError("grid: need at least 4 points per axis");
  if (!(x_lo < x_hi) || !(v_lo < v_hi))
    throw ConfigError("grid: bounds must be ordered");

  dx_ = (x_hi_ - x_lo_) / nx_;
  dv_ = (v_hi_ - v_lo_) / (nv_ - 1);
  total_nx_ = 1;
  total_nv_ = 1;
  for (int m = 0; m < d_; ++m) {
    total_nx_ *= nx_;
    total_nv_ *= nv_;
  }
  x_weight_ = 1.0;
  for (int m = 0; m < d_; ++m)
    x_weight_ *= dx_;

  // Trapezoid weights: 1/2 at the per-axis endpoints, tensorized over axes.
  Eigen::VectorXd axis(nv_);
  axis.setConstant(dv_);
  axis(0) *= 0.5;
  axis(nv_ - 1) *= 0.5;
  v_weights_.resize(total_nv_);
  for (Eigen::Index q = 0; q < total_nv_; ++q) {
    auto m = v_multi(q);
    v_weights_(q) = d_ == 2 ? axis(m[0]) * axis(m[1]) : axis(m[0]);
  }
}

double Grid::cfl_timestep(double v_max, double cfl) const {
  if (!(cfl > 0.0) || cfl > 1.0)
    throw ConfigError("cfl_timestep: cfl must be in (0, 1]");
  if (!(v_max > 0.0))
    throw ConfigError("cfl_timestep: v_max must be positive");
  return cfl * dx_ / v_max;
}

} // namespace kdlr

#pragma once

#include <Eigen/Core>

#include "kdlr/grid.hpp"

namespace kdlr {

// Second-order finite-difference building blocks shared by the coefficient,
// field, and collision assembly. x variants wrap periodically; v variants use
// one-sided second-order stencils at the domain ends.

/// d/dx_axis of each column of F (Nx x k), centered, periodic.
Eigen::MatrixXd x_derivative(const Eigen::MatrixXd& F, int axis, const Grid& g);

/// d/dv_axis of each column of F (Nv x k), centered inside, one-sided at the ends.
Eigen::MatrixXd v_derivative(const Eigen::MatrixXd& F, int axis, const Grid& g);

/// d^2/dv_axis^2 of each column of F, centered inside, one-sided at the ends.
Eigen::MatrixXd v_second_derivative(const Eigen::MatrixXd& F, int axis, const Grid& g);

} // namespace kdlr

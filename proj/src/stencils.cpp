#include "kdlr/stencils.hpp"

namespace kdlr {

namespace {

// Visit every 1D line of the tensor grid along `axis`; cb(start, stride).
// Works for both 1D (axis 0 only) and 2D tensor layouts with axis 0 fastest.
template <class F>
void for_each_line(int axis, int n, Eigen::Index total, F cb) {
  if (axis == 0) {
    for (Eigen::Index start = 0; start < total; start += n)
      cb(start, Eigen::Index(1));
  } else {
    for (Eigen::Index start = 0; start < n; ++start)
      cb(start, Eigen::Index(n));
  }
}

} // namespace

Eigen::MatrixXd x_derivative(const Eigen::MatrixXd& F, int axis, const Grid& g) {
  const int n = g.nx_per_axis();
  const double inv2h = 1.0 / (2.0 * g.dx());
  Eigen::MatrixXd out(F.rows(), F.cols());
  for (Eigen::Index c = 0; c < F.cols(); ++c) {
    for_each_line(axis, n, F.rows(), [&](Eigen::Index s, Eigen::Index stride) {
      for (int i = 0; i < n; ++i) {
        const int ip = (i + 1) % n;
        const int im = (i + n - 1) % n;
        out(s + i * stride, c) =
            (F(s + ip * stride, c) - F(s + im * stride, c)) * inv2h;
      }
    });
  }
  return out;
}

Eigen::MatrixXd v_derivative(const Eigen::MatrixXd& F, int axis, const Grid& g) {
  const int n = g.nv_per_axis();
  const double h = g.dv();
  Eigen::MatrixXd out(F.rows(), F.cols());
  for (Eigen::Index c = 0; c < F.cols(); ++c) {
    for_each_line(axis, n, F.rows(), [&](Eigen::Index s, Eigen::Index stride) {
      auto f = [&](int i) -> double { return F(s + i * stride, c); };
      out(s, c) = (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
      for (int i = 1; i < n - 1; ++i)
        out(s + i * stride, c) = (f(i + 1) - f(i - 1)) / (2.0 * h);
      out(s + (n - 1) * stride, c) =
          (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h);
    });
  }
  return out;
}

Eigen::MatrixXd v_second_derivative(const Eigen::MatrixXd& F, int axis, const Grid& g) {
  const int n = g.nv_per_axis();
  const double invh2 = 1.0 / (g.dv() * g.dv());
  Eigen::MatrixXd out(F.rows(), F.cols());
  for (Eigen::Index c = 0; c < F.cols(); ++c) {
    for_each_line(axis, n, F.rows(), [&](Eigen::Index s, Eigen::Index stride) {
      auto f = [&](int i) -> double { return F(s + i * stride, c); };
      out(s, c) = (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) * invh2;
      for (int i = 1; i < n - 1; ++i)
        out(s + i * stride, c) = (f(i + 1) - 2.0 * f(i) + f(i - 1)) * invh2;
      out(s + (n - 1) * stride, c) =
          (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)) * invh2;
    });
  }
  return out;
}

} // namespace kdlr

#include <doctest.h>

#include <cmath>

#include "kdlr/maxwellian.hpp"
#include "oracles.hpp"

using namespace kdlr;

TEST_CASE("maxwellian values and discrete moments") {
  Grid g(1, 0.0, 1.0, 8, -10.0, 10.0, 128);
  Eigen::VectorXd M = maxwellian({0.0, 0.0}, g);
  // value at v = 0
  int mid = 127 / 2;
  double at0 = 1.0 / std::sqrt(2.0 * M_PI);
  CHECK(M((127 + 1) / 2) <= at0 + 1e-12); // grid has no exact v = 0 node at even nv
  Grid godd(1, 0.0, 1.0, 8, -10.0, 10.0, 129);
  M = maxwellian({0.0, 0.0}, godd);
  CHECK(M(64) == doctest::Approx(at0).epsilon(1e-12));

  for (double e : {0.0, 1.5, -3.0}) {
    Eigen::VectorXd Me = maxwellian({e, 0.0}, godd);
    double mass = (godd.v_weights().array() * Me.array()).sum();
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    double mean = 0.0;
    for (Eigen::Index q = 0; q < godd.total_nv(); ++q)
      mean += godd.v_weights()(q) * godd.v_node(q) * Me(q);
    CHECK(std::abs(mean - e) <= 1e-9);
  }
  // at |E| = 4 the tail cut off by the domain costs ~1e-9 of mass
  Eigen::VectorXd M4 = maxwellian({-4.0, 0.0}, godd);
  CHECK(std::abs((godd.v_weights().array() * M4.array()).sum() - 1.0) <= 5e-9);
  (void)mid;
}

TEST_CASE("moment_convolution of constants and linears") {
  Grid g(1, 0.0, 1.0, 8, -10.0, 10.0, 128);
  MomentConvolver conv(g);
  Eigen::MatrixXd V = Eigen::MatrixXd::Ones(g.total_nv(), 1);

  // w = 1: ell = sqrt(2 pi) at interior zeta
  MomentTable t = conv.moment_convolution(V, -1);
  for (Eigen::Index q = 0; q < g.total_nv(); ++q) {
    if (std::abs(g.v_node(q)) <= 4.0)
      CHECK(t.ell(q, 0) == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-9));
  }

  // w = v: ell(zeta) = zeta sqrt(2 pi)
  t = conv.moment_convolution(V, 0);
  for (Eigen::Index q = 0; q < g.total_nv(); ++q) {
    if (std::abs(g.v_node(q)) <= 4.0)
      CHECK(t.ell(q, 0) ==
            doctest::Approx(g.v_node(q) * std::sqrt(2.0 * M_PI)).epsilon(1e-8));
  }

  // V = v with w = v: ell(zeta) = (zeta^2 + 1) sqrt(2 pi)
  for (Eigen::Index q = 0; q < g.total_nv(); ++q)
    V(q, 0) = g.v_node(q);
  t = conv.moment_convolution(V, 0);
  for (Eigen::Index q = 0; q < g.total_nv(); ++q) {
    double z = g.v_node(q);
    if (std::abs(z) <= 4.0)
      CHECK(t.ell(q, 0) ==
            doctest::Approx((z * z + 1.0) * std::sqrt(2.0 * M_PI)).epsilon(1e-8));
  }
}

TEST_CASE("moment_convolution equals direct quadrature") {
  for (int d : {1, 2}) {
    Grid g(d, 0.0, 1.0, 8, -10.0, 10.0, d == 1 ? 96 : 48);
    MomentConvolver conv(g);
    Eigen::MatrixXd V = oracles::random_matrix(g.total_nv(), 3, 21);
    for (int w = -1; w < d; ++w) {
      MomentTable t = conv.moment_convolution(V, w);
      for (Eigen::Index q = 0; q < g.total_nv(); q += 17) {
        auto z = g.v_coord(q);
        for (int j = 0; j < 3; ++j) {
          double direct = oracles::direct_moment(g, V.col(j), w, z);
          CHECK(t.ell(q, j) == doctest::Approx(direct).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("even V with odd weight vanishes at zeta = 0") {
  Grid g(1, 0.0, 1.0, 8, -10.0, 10.0, 129); // odd count so v = 0 is a node
  MomentConvolver conv(g);
  Eigen::MatrixXd V(g.total_nv(), 1);
  for (Eigen::Index q = 0; q < g.total_nv(); ++q)
    V(q, 0) = std::exp(-0.3 * g.v_node(q) * g.v_node(q));
  MomentTable t = conv.moment_convolution(V, 0);
  CHECK(std::abs(t.ell(64, 0)) <= 1e-12);
}

TEST_CASE("evaluate_at_field node hits and linear reproduction") {
  Grid g(1, 0.0, 1.0, 16, -10.0, 10.0, 64);
  MomentConvolver conv(g);
  Eigen::MatrixXd V = Eigen::MatrixXd::Ones(g.total_nv(), 1);
  MomentTable t = conv.moment_convolution(V, 0); // ell = zeta sqrt(2pi)

  // exact node hit
  Eigen::MatrixXd E(16, 1);
  for (int p = 0; p < 16; ++p)
    E(p, 0) = g.v_node(20 + p);
  Eigen::MatrixXd I = conv.evaluate_at_field(t, E);
  for (int p = 0; p < 16; ++p)
    CHECK(I(p, 0) == doctest::Approx(t.ell(20 + p, 0) / std::sqrt(2.0 * M_PI))
                         .epsilon(1e-12));

  // linear functions are reproduced exactly between nodes
  for (int p = 0; p < 16; ++p)
    E(p, 0) = -3.0 + 0.37 * p * g.dv();
  I = conv.evaluate_at_field(t, E);
  for (int p = 0; p < 16; ++p)
    CHECK(I(p, 0) == doctest::Approx(E(p, 0)).epsilon(1e-8));
}

TEST_CASE("evaluate_at_field interpolation error bound on a quadratic") {
  Grid g(1, 0.0, 1.0, 64, -10.0, 10.0, 64);
  MomentConvolver conv(g);
  Eigen::MatrixXd V(g.total_nv(), 1);
  for (Eigen::Index q = 0; q < g.total_nv(); ++q)
    V(q, 0) = g.v_node(q);
  MomentTable t = conv.moment_convolution(V, 0); // ell = (z^2+1) sqrt(2pi)

  Eigen::MatrixXd E(64, 1);
  for (int p = 0; p < 64; ++p)
    E(p, 0) = -3.5 + 0.11 * p;
  Eigen::MatrixXd I = conv.evaluate_at_field(t, E);
  // |interp error| <= dv^2/8 * max|ell''|, ell'' = 2 sqrt(2pi); plus the
  // quadrature offset of the table itself (~1e-8 relative).
  const double bound = g.dv() * g.dv() / 8.0 * 2.0 + 1e-6;
  for (int p = 0; p < 64; ++p)
    CHECK(std::abs(I(p, 0) - (E(p, 0) * E(p, 0) + 1.0)) <= bound);
}

TEST_CASE("evaluate_at_field rejects out-of-range fields") {
  Grid g(1, 0.0, 1.0, 8, -10.0, 10.0, 64);
  MomentConvolver conv(g);
  MomentTable t =
      conv.moment_convolution(Eigen::MatrixXd::Ones(g.total_nv(), 1), -1);
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(8, 1);
  E(5, 0) = 11.0;
  CHECK_THROWS_AS(conv.evaluate_at_field(t, E), SolverError);
}

TEST_CASE("macroscopic_moments of the unit state") {
  Grid g(1, 0.0, 1.0, 32, -10.0, 10.0, 128);
  MomentConvolver conv(g);
  LowRankState st = init_from_samples(
      Eigen::MatrixXd::Ones(g.total_nx(), g.total_nv()), 2, g);
  Eigen::MatrixXd E(32, 1);
  for (int p = 0; p < 32; ++p)
    E(p, 0) = 0.5 * std::sin(2.0 * M_PI * g.x_node(p));

  Moments mom = macroscopic_moments(st, E, g, conv);
  for (int p = 0; p < 32; ++p) {
    CHECK(mom.rho(p) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(mom.J(p, 0) == doctest::Approx(E(p, 0)).epsilon(1e-8));
  }

  st.S.setZero();
  mom = macroscopic_moments(st, E, g, conv);
  CHECK(mom.rho.cwiseAbs().maxCoeff() == 0.0);
  CHECK(mom.J.cwiseAbs().maxCoeff() == 0.0);
}

namespace {

Eigen::MatrixXd counterstream_quotient(const Grid& g) {
  Eigen::MatrixXd gq(g.total_nx(), g.total_nv());
  for (Eigen::Index p = 0; p < g.total_nx(); ++p) {
    const double x = g.x_node(static_cast<int>(p));
    const double rho = std::sqrt(2.0 * M_PI) * (2.0 + std::cos(2.0 * M_PI * x));
    for (Eigen::Index q = 0; q < g.total_nv(); ++q) {
      const double v = g.v_node(static_cast<int>(q));
      const double f = rho / (2.0 * std::sqrt(2.0 * M_PI)) *
                       (std::exp(-0.5 * (v - 1.5) * (v - 1.5)) +
                        std::exp(-0.5 * (v + 1.5) * (v + 1.5)));
      gq(p, q) = f / (std::exp(-0.5 * v * v) / std::sqrt(2.0 * M_PI));
    }
  }
  return gq;
}

} // namespace

TEST_CASE("macroscopic_moments agree with dense quadrature on zeta nodes") {
  // With the field sitting exactly on zeta nodes the table lookup is exact and
  // the two routes are the same sum in different order.
  Grid g(1, 0.0, 1.0, 24, -10.0, 10.0, 96);
  MomentConvolver conv(g);
  LowRankState st = init_from_samples(counterstream_quotient(g), 10, g);
  Eigen::MatrixXd E(g.total_nx(), 1);
  for (Eigen::Index p = 0; p < g.total_nx(); ++p)
    E(p, 0) = g.v_node(44 + static_cast<int>(p) % 8);

  Moments mom = macroscopic_moments(st, E, g, conv);
  Eigen::MatrixXd f = reconstruct_f(st, E, g);
  Eigen::VectorXd rho_o = oracles::dense_velocity_moment(g, f, -1);
  Eigen::VectorXd j_o = oracles::dense_velocity_moment(g, f, 0);
  CHECK((mom.rho - rho_o).cwiseAbs().maxCoeff() <= 1e-8 * rho_o.cwiseAbs().maxCoeff());
  CHECK((mom.J.col(0) - j_o).cwiseAbs().maxCoeff() <= 1e-8 * rho_o.cwiseAbs().maxCoeff());
}

TEST_CASE("macroscopic_moments interpolation error is second order in dv") {
  // Off the nodes the tables are looked up linearly, so the distance to the
  // dense quadrature shrinks by 4x per dv halving.
  Eigen::Vector2d errs;
  int k = 0;
  for (int nv : {96, 192}) {
    Grid g(1, 0.0, 1.0, 24, -10.0, 10.0, nv);
    MomentConvolver conv(g);
    LowRankState st = init_from_samples(counterstream_quotient(g), 10, g);
    Eigen::MatrixXd E(g.total_nx(), 1);
    for (Eigen::Index p = 0; p < g.total_nx(); ++p)
      E(p, 0) = 0.4 * std::sin(2.0 * M_PI * g.x_node(static_cast<int>(p)) + 0.3);

    Moments mom = macroscopic_moments(st, E, g, conv);
    Eigen::VectorXd rho_o =
        oracles::dense_velocity_moment(g, reconstruct_f(st, E, g), -1);
    errs(k++) = (mom.rho - rho_o).cwiseAbs().maxCoeff() / rho_o.cwiseAbs().maxCoeff();
  }
  CHECK(errs(0) / errs(1) > 2.5);
  CHECK(errs(1) < 1e-2);
}

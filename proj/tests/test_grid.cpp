#include <doctest.h>

#include "kdlr/grid.hpp"

using namespace kdlr;

TEST_CASE("grid spacings and nodes") {
  Grid g(1, 0.0, 1.0, 4, -10.0, 10.0, 5);
  CHECK(g.dx() == 0.25);
  CHECK(g.x_node(0) == 0.0);
  CHECK(g.x_node(1) == doctest::Approx(0.25));
  CHECK(g.x_node(3) == doctest::Approx(0.75));
  CHECK(g.dv() == doctest::Approx(5.0));
  CHECK(g.v_node(0) == -10.0);
  CHECK(g.v_node(2) == doctest::Approx(0.0));
  CHECK(g.v_node(4) == 10.0);
}

TEST_CASE("grid totals in 2d") {
  Grid g(2, 0.0, 1.0, 24, -5.0, 5.0, 8);
  CHECK(g.total_nx() == 576);
  CHECK(g.total_nv() == 64);
  CHECK(g.x_index(3, 2) == 3 + 24 * 2);
  auto m = g.x_multi(g.x_index(3, 2));
  CHECK(m[0] == 3);
  CHECK(m[1] == 2);
}

TEST_CASE("node coordinates reproduce bounds") {
  Grid g(1, 0.0, 1.0, 7, -10.0, 10.0, 9);
  CHECK(g.x_node(0) == g.x_lo());
  CHECK(g.v_node(0) == g.v_lo());
  CHECK(g.v_node(g.nv_per_axis() - 1) == g.v_hi());
}

TEST_CASE("trapezoid weights integrate constants exactly") {
  Grid g1(1, 0.0, 1.0, 8, -10.0, 10.0, 33);
  CHECK(g1.v_weights().sum() == doctest::Approx(20.0).epsilon(1e-14));
  Grid g2(2, 0.0, 1.0, 8, -10.0, 10.0, 17);
  CHECK(g2.v_weights().sum() == doctest::Approx(400.0).epsilon(1e-13));
  CHECK(g1.x_weight() * g1.total_nx() == doctest::Approx(1.0));
  CHECK(g2.x_weight() * g2.total_nx() == doctest::Approx(1.0));
}

TEST_CASE("cfl timestep") {
  Grid fine(1, 0.0, 1.0, 512, -10.0, 10.0, 64);
  // paper instance: dt = 1 / (512 * 4 * v_max) with v_max = 10
  CHECK(fine.cfl_timestep(10.0, 0.25) == doctest::Approx(4.8828125e-5).epsilon(1e-12));

  Grid coarse(1, 0.0, 1.0, 4, -10.0, 10.0, 5);
  CHECK(coarse.cfl_timestep(10.0, 1.0) == doctest::Approx(0.025));

  Grid g2(2, 0.0, 1.0, 4, -10.0, 10.0, 5);
  CHECK(g2.cfl_timestep(10.0, 1.0) == doctest::Approx(0.025));

  CHECK_THROWS_AS(coarse.cfl_timestep(10.0, 0.0), ConfigError);
  CHECK_THROWS_AS(coarse.cfl_timestep(-1.0, 0.5), ConfigError);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid(3, 0.0, 1.0, 8, -10.0, 10.0, 8), ConfigError);
  CHECK_THROWS_AS(Grid(1, 0.0, 1.0, 3, -10.0, 10.0, 8), ConfigError);
  CHECK_THROWS_AS(Grid(1, 1.0, 0.0, 8, -10.0, 10.0, 8), ConfigError);
  CHECK_THROWS_AS(Grid(1, 0.0, 1.0, 8, 10.0, -10.0, 8), ConfigError);
}

TEST_CASE("grids are deterministic") {
  Grid a(2, 0.0, 1.0, 12, -10.0, 10.0, 9);
  Grid b(2, 0.0, 1.0, 12, -10.0, 10.0, 9);
  CHECK(a.dx() == b.dx());
  CHECK(a.dv() == b.dv());
  CHECK((a.v_weights() - b.v_weights()).norm() == 0.0);
}

#include "kdlr/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>

namespace kdlr {

namespace {

// Linear interpolation weights of one coarse axis at a fine-grid coordinate.
struct AxisWeight {
  int i0;
  double frac;
};

AxisWeight locate_periodic(double xf, double lo, double dx, int n) {
  double s = (xf - lo) / dx;
  int i0 = static_cast<int>(std::floor(s));
  double frac = s - i0;
  i0 %= n;
  if (i0 < 0)
    i0 += n;
  return {i0, frac};
}

AxisWeight locate_bounded(double xf, double lo, double dx, int n) {
  double s = (xf - lo) / dx;
  int i0 = static_cast<int>(std::floor(s));
  if (i0 > n - 2)
    i0 = n - 2;
  if (i0 < 0)
    i0 = 0;
  return {i0, s - i0};
}

void check_compatible(const Grid& a, const Grid& b) {
  if (a.dim() != b.dim())
    throw ConfigError("l1_diff: dimension mismatch");
  if (a.x_lo() != b.x_lo() || a.x_hi() != b.x_hi() || a.v_lo() != b.v_lo() ||
      a.v_hi() != b.v_hi())
    throw ConfigError("l1_diff: domain mismatch");
  if (b.nx_per_axis() % a.nx_per_axis() != 0 ||
      b.nv_per_axis() % a.nv_per_axis() != 0)
    throw ConfigError("l1_diff: fine grid must refine the coarse one by an "
                      "integer factor");
}

// Interpolate a coarse x-grid sample at a fine x node (periodic, per axis).
double interp_x(const Eigen::VectorXd& u, const Grid& gc, const Grid& gf,
                Eigen::Index pf) {
  auto mf = gf.x_multi(pf);
  AxisWeight w0 =
      locate_periodic(gf.x_node(mf[0]), gc.x_lo(), gc.dx(), gc.nx_per_axis());
  if (gc.dim() == 1) {
    int i1 = (w0.i0 + 1) % gc.nx_per_axis();
    return (1.0 - w0.frac) * u(w0.i0) + w0.frac * u(i1);
  }
  AxisWeight w1 =
      locate_periodic(gf.x_node(mf[1]), gc.x_lo(), gc.dx(), gc.nx_per_axis());
  const int n = gc.nx_per_axis();
  const int i0p = (w0.i0 + 1) % n;
  const int i1p = (w1.i0 + 1) % n;
  double a = (1.0 - w0.frac) * u(gc.x_index(w0.i0, w1.i0)) +
             w0.frac * u(gc.x_index(i0p, w1.i0));
  double b = (1.0 - w0.frac) * u(gc.x_index(w0.i0, i1p)) +
             w0.frac * u(gc.x_index(i0p, i1p));
  return (1.0 - w1.frac) * a + w1.frac * b;
}

} // namespace

double l1_diff(const Eigen::MatrixXd& fA, const Grid& gridA,
               const Eigen::MatrixXd& fB, const Grid& gridB) {
  const Grid* gc = &gridA;
  const Grid* gf = &gridB;
  const Eigen::MatrixXd* fc = &fA;
  const Eigen::MatrixXd* ff = &fB;
  if (gridA.total_nx() * gridA.total_nv() > gridB.total_nx() * gridB.total_nv()) {
    std::swap(gc, gf);
    std::swap(fc, ff);
  }
  check_compatible(*gc, *gf);

  const int d = gf->dim();
  // per-axis interpolation tables for x (periodic) and v (bounded)
  const int nxf = gf->nx_per_axis();
  const int nvf = gf->nv_per_axis();
  std::vector<AxisWeight> wx(nxf), wv(nvf);
  for (int i = 0; i < nxf; ++i)
    wx[i] = locate_periodic(gf->x_node(i), gc->x_lo(), gc->dx(), gc->nx_per_axis());
  for (int i = 0; i < nvf; ++i)
    wv[i] = locate_bounded(gf->v_node(i), gc->v_lo(), gc->dv(), gc->nv_per_axis());

  const int nxc = gc->nx_per_axis();
  auto xpair = [&](const AxisWeight& w) {
    return std::pair<int, int>(w.i0, (w.i0 + 1) % nxc);
  };

  double acc = 0.0;
  for (Eigen::Index pf = 0; pf < gf->total_nx(); ++pf) {
    auto mp = gf->x_multi(pf);
    auto [x00, x01] = xpair(wx[mp[0]]);
    const double tx0 = wx[mp[0]].frac;
    auto [x10, x11] = d == 2 ? xpair(wx[mp[1]]) : std::pair<int, int>(0, 0);
    const double tx1 = d == 2 ? wx[mp[1]].frac : 0.0;

    for (Eigen::Index qf = 0; qf < gf->total_nv(); ++qf) {
      auto mq = gf->v_multi(qf);
      const AxisWeight& v0 = wv[mq[0]];
      double coarse;
      if (d == 1) {
        double a = (1.0 - v0.frac) * (*fc)(x00, v0.i0) +
                   v0.frac * (*fc)(x00, v0.i0 + 1);
        double b = (1.0 - v0.frac) * (*fc)(x01, v0.i0) +
                   v0.frac * (*fc)(x01, v0.i0 + 1);
        coarse = (1.0 - tx0) * a + tx0 * b;
      } else {
        const AxisWeight& v1 = wv[mq[1]];
        coarse = 0.0;
        const double cx[2] = {1.0 - tx0, tx0};
        const double cy[2] = {1.0 - tx1, tx1};
        const double cu[2] = {1.0 - v0.frac, v0.frac};
        const double cw[2] = {1.0 - v1.frac, v1.frac};
        const int xi[2] = {x00, x01};
        const int yi[2] = {x10, x11};
        for (int ax = 0; ax < 2; ++ax)
          for (int ay = 0; ay < 2; ++ay)
            for (int au = 0; au < 2; ++au)
              for (int aw = 0; aw < 2; ++aw)
                coarse += cx[ax] * cy[ay] * cu[au] * cw[aw] *
                          (*fc)(gc->x_index(xi[ax], yi[ay]),
                                gc->v_index(v0.i0 + au, v1.i0 + aw));
      }
      acc += std::abs((*ff)(pf, qf) - coarse);
    }
  }
  double dv_d = 1.0, cell = gf->x_weight();
  for (int m = 0; m < d; ++m)
    dv_d *= gf->dv();
  return acc * cell * dv_d;
}

double l1_diff_density(const Eigen::VectorXd& rhoA, const Grid& gridA,
                       const Eigen::VectorXd& rhoB, const Grid& gridB) {
  const Grid* gc = &gridA;
  const Grid* gf = &gridB;
  const Eigen::VectorXd* fc = &rhoA;
  const Eigen::VectorXd* ff = &rhoB;
  if (gridA.total_nx() > gridB.total_nx()) {
    std::swap(gc, gf);
    std::swap(fc, ff);
  }
  if (gf->nx_per_axis() % gc->nx_per_axis() != 0 || gf->dim() != gc->dim())
    throw ConfigError("l1_diff_density: incompatible grids");
  double acc = 0.0;
  for (Eigen::Index pf = 0; pf < gf->total_nx(); ++pf)
    acc += std::abs((*ff)(pf) - interp_x(*fc, *gc, *gf, pf));
  return acc * gf->x_weight();
}

double observed_order(const std::vector<double>& h,
                      const std::vector<double>& errors) {
  if (h.size() != errors.size())
    throw ConfigError("observed_order: length mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(errors[i] > 0.0) || !(h[i] > 0.0)) {
      std::cerr << "observed_order: dropping non-positive sample at h = "
                << h[i] << "\n";
      continue;
    }
    lx.push_back(std::log(h[i]));
    ly.push_back(std::log(errors[i]));
  }
  if (lx.size() < 2)
    throw ConfigError("observed_order: need at least two positive errors");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= ly.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return num / den;
}

double maxwellian_distance(const LowRankState& state, const Eigen::MatrixXd& E,
                           const Grid& grid, const MomentConvolver& conv) {
  Moments mom = macroscopic_moments(state, E, grid, conv);
  const int d = grid.dim();
  const Eigen::Index nx = grid.total_nx();
  const Eigen::Index nv = grid.total_nv();
  double acc = 0.0;
  Eigen::RowVectorXd grow(nv);
  for (Eigen::Index p = 0; p < nx; ++p) {
    grow.noalias() = state.X.row(p) * state.S * state.V.transpose();
    Eigen::VectorXd M =
        maxwellian({E(p, 0), d == 2 ? E(p, 1) : 0.0}, grid);
    // f - rho M = M (g - rho)
    for (Eigen::Index q = 0; q < nv; ++q)
      acc += grid.v_weights()(q) * M(q) * std::abs(grow(q) - mom.rho(p));
  }
  return acc * grid.x_weight();
}

double maxwellian_distance_full(const Eigen::MatrixXd& f, const Eigen::MatrixXd& E,
                                const Grid& grid) {
  const int d = grid.dim();
  double acc = 0.0;
  for (Eigen::Index p = 0; p < grid.total_nx(); ++p) {
    Eigen::VectorXd M =
        maxwellian({E(p, 0), d == 2 ? E(p, 1) : 0.0}, grid);
    const double rho = grid.v_weights().dot(f.row(p).transpose());
    for (Eigen::Index q = 0; q < grid.total_nv(); ++q)
      acc += grid.v_weights()(q) * std::abs(f(p, q) - rho * M(q));
  }
  return acc * grid.x_weight();
}

void RunHistory::append(double time, const Eigen::VectorXd& sig, double m,
                        double gauss, double maxw, double ms) {
  if (t.empty())
    rank = static_cast<int>(sig.size());
  t.push_back(time);
  sigma.push_back(sig);
  mass.push_back(m);
  gauss_res.push_back(gauss);
  maxw_dist.push_back(maxw);
  wall_ms.push_back(ms);
}

void write_history_csv(const RunHistory& history, std::ostream& out) {
  out << "t";
  for (int k = 1; k <= history.rank; ++k)
    out << ",sigma" << k;
  out << ",mass,gauss_res,maxw_dist,wall_ms\n";
  char buf[32];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
  };
  for (std::size_t i = 0; i < history.size(); ++i) {
    put(history.t[i]);
    for (int k = 0; k < history.rank; ++k) {
      out << ",";
      put(history.sigma[i](k));
    }
    out << ",";
    put(history.mass[i]);
    out << ",";
    put(history.gauss_res[i]);
    out << ",";
    put(history.maxw_dist[i]);
    out << ",";
    put(history.wall_ms[i]);
    out << "\n";
  }
}

} // namespace kdlr

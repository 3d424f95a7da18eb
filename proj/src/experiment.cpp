#include "kdlr/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "kdlr/checkpoint.hpp"

namespace kdlr {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Regularization of the initial quotient: the Maxwellian is offset by its
// value six deviations out, so dividing f's slow tails cannot manufacture
// exponentially large values where f itself is negligible.
double quotient_offset(int d) {
  return std::pow(2.0 * M_PI, -0.5 * d) * std::exp(-18.0);
}

struct ICDefinition {
  // f0(x, v) and eta(x); local_equilibrium additionally needs the initial
  // field, supplied through E_pre below.
  std::function<double(const std::array<double, 2>&, const std::array<double, 2>&)> f0;
  std::function<double(const std::array<double, 2>&)> eta;
};

ICDefinition make_ic(const ExperimentConfig& cfg, const Grid& grid,
                     const Eigen::MatrixXd* E_pre) {
  const double s2pi = std::sqrt(2.0 * M_PI);
  switch (cfg.ic) {
  case ICKind::Counterstreaming:
    return {[s2pi](const auto& x, const auto& v) {
              const double rho = s2pi * (2.0 + std::cos(2.0 * M_PI * x[0]));
              return rho / (2.0 * s2pi) *
                     (std::exp(-0.5 * (v[0] - 1.5) * (v[0] - 1.5)) +
                      std::exp(-0.5 * (v[0] + 1.5) * (v[0] + 1.5)));
            },
            [s2pi](const auto& x) {
              return 2.0 * s2pi / 1.2661 * std::exp(std::cos(2.0 * M_PI * x[0]));
            }};
  case ICKind::LocalEquilibrium: {
    if (!E_pre)
      throw ConfigError("local_equilibrium needs the pre-computed field");
    const Eigen::MatrixXd E = *E_pre;
    const Grid* g = &grid;
    return {[s2pi, E, g](const auto& x, const auto& v) {
              // recover the node index from the coordinate
              const int i =
                  static_cast<int>(std::lround((x[0] - g->x_lo()) / g->dx()));
              const double rho = s2pi / 2.0 * (2.0 + std::cos(2.0 * M_PI * x[0]));
              const double dv0 = v[0] - E(i, 0);
              return rho / s2pi * std::exp(-0.5 * dv0 * dv0);
            },
            [s2pi](const auto& x) {
              return s2pi / 1.2661 * std::exp(std::cos(2.0 * M_PI * x[0]));
            }};
  }
  case ICKind::BumpOnTail:
    return {[](const auto& x, const auto& v) {
              const double rho =
                  0.3 + std::exp(-std::pow(x[0] - 0.3, 2) / 0.01);
              const double tcold = 0.005;
              return rho / std::sqrt(2.0 * M_PI) *
                     (std::exp(-0.5 * v[0] * v[0]) +
                      std::exp(-std::pow(v[0] - 1.5, 2) / (2.0 * tcold)));
            },
            [](const auto& x) {
              return 0.3 + std::exp(-std::pow(x[0] - 0.6, 2) / 0.01);
            }};
  case ICKind::PotentialHill2D: {
    // elongated Gaussian density rotated by pi/4, drifting along its major
    // axis; background charge removed on the band x in [0.55, 0.7]
    const double c = std::cos(M_PI / 4.0), s = std::sin(M_PI / 4.0);
    const double l1 = 0.006, l2 = 0.03;
    const double det = l1 * l2;
    const double T = 0.01;
    return {[=](const auto& x, const auto& v) {
              const double dx0 = x[0] - 0.3, dx1 = x[1] - 0.3;
              // Sigma^{-1} = R diag(1/l) R^T
              const double y0 = c * dx0 + s * dx1;
              const double y1 = -s * dx0 + c * dx1;
              const double quad = y0 * y0 / l1 + y1 * y1 / l2;
              const double rho =
                  0.1 + 0.0003 / (2.0 * M_PI * det) * std::exp(-0.5 * quad);
              const double dv0 = v[0] - 0.5, dv1 = v[1] - 0.5;
              return rho / (2.0 * M_PI * T) *
                     std::exp(-0.5 * (dv0 * dv0 + dv1 * dv1) / T);
            },
            [](const auto& x) {
              return (x[0] >= 0.55 && x[0] <= 0.7) ? 0.0 : 1.0;
            }};
  }
  case ICKind::ColdBeam2D:
    return {[](const auto& x, const auto& v) {
              (void)x;
              const double dv0 = v[0] - 4.0, dv1 = v[1] - 2.0;
              return std::exp(-(dv0 * dv0 + dv1 * dv1) / 0.5);
            },
            [](const auto&) { return 1.0; }};
  case ICKind::Custom:
    throw ConfigError("make_ic: custom initial data is loaded from file");
  }
  throw ConfigError("make_ic: unhandled initial condition");
}

Eigen::MatrixXd sample_f(const ICDefinition& ic, const Grid& g) {
  Eigen::MatrixXd f(g.total_nx(), g.total_nv());
  for (Eigen::Index p = 0; p < g.total_nx(); ++p) {
    const auto x = g.x_coord(p);
    for (Eigen::Index q = 0; q < g.total_nv(); ++q)
      f(p, q) = ic.f0(x, g.v_coord(q));
  }
  return f;
}

Eigen::VectorXd sample_eta(const ICDefinition& ic, const Grid& g) {
  Eigen::VectorXd eta(g.total_nx());
  for (Eigen::Index p = 0; p < g.total_nx(); ++p)
    eta(p) = ic.eta(g.x_coord(p));
  return eta;
}

Eigen::MatrixXd quotient(const Eigen::MatrixXd& f, const Eigen::MatrixXd& E,
                         const Grid& g) {
  const int d = g.dim();
  const double norm = std::pow(2.0 * M_PI, -0.5 * d);
  const double offset = quotient_offset(d);
  Eigen::MatrixXd out(f.rows(), f.cols());
  for (Eigen::Index p = 0; p < f.rows(); ++p) {
    for (Eigen::Index q = 0; q < f.cols(); ++q) {
      const auto v = g.v_coord(q);
      double e2 = 0.0;
      for (int m = 0; m < d; ++m) {
        const double dvm = v[m] - E(p, m);
        e2 += dvm * dvm;
      }
      out(p, q) = f(p, q) / (norm * std::exp(-0.5 * e2) + offset);
    }
  }
  return out;
}

void write_field_csv(const std::string& path, const FieldState& field,
                     const Grid& g) {
  std::ofstream out(path);
  const int d = g.dim();
  out << (d == 2 ? "x0,x1,E0,E1,rho\n" : "x,E,rho\n");
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (Eigen::Index p = 0; p < g.total_nx(); ++p) {
    const auto x = g.x_coord(p);
    put(x[0]);
    if (d == 2) {
      out << ",";
      put(x[1]);
    }
    for (int m = 0; m < d; ++m) {
      out << ",";
      put(field.E(p, m));
    }
    out << ",";
    put(field.rho(p));
    out << "\n";
  }
}

void write_history_plot(const std::string& dir, int rank) {
  std::ofstream gp(dir + "/plots/history.gp");
  gp << "# gnuplot script: singular value and conservation histories\n"
     << "set datafile separator ','\n"
     << "set key outside\n"
     << "set logscale y\n"
     << "set xlabel 't'\n";
  if (rank > 0) {
    gp << "set ylabel 'sigma_k / sigma_1'\n"
       << "plot for [k=2:" << rank + 1 << "] '../history.csv' using 1:(column(k)/column(2)) "
       << "with lines title sprintf('sigma_%d', k-1)\n";
  }
  gp << "pause -1\n"
     << "set ylabel 'distance to local equilibrium'\n"
     << "plot '../history.csv' using 1:" << rank + 4
     << " with lines title 'maxw dist'\n"
     << "pause -1\n";
}

void write_convergence_plot(const std::string& dir) {
  std::ofstream gp(dir + "/plots/convergence.gp");
  gp << "# gnuplot script: successive L1 differences under refinement\n"
     << "set datafile separator ','\n"
     << "set logscale xy\n"
     << "set xlabel 'h'\n"
     << "set ylabel 'L1 difference'\n"
     << "plot '../convergence_x.csv' using 2:3 with linespoints title 'x sweep', \\\n"
     << "     '../convergence_v.csv' using 2:3 with linespoints title 'v sweep'\n"
     << "pause -1\n";
}

} // namespace

InitialData build_initial_data(const ExperimentConfig& cfg) {
  Grid grid(cfg.d, 0.0, 1.0, cfg.nx, cfg.v_lo, cfg.v_hi, cfg.nv);
  InitialData data(grid);

  if (cfg.ic == ICKind::Custom) {
    // A loaded distribution is treated as a fresh initial condition: the
    // field comes from Gauss's law against a uniform neutralizing background.
    Eigen::MatrixXd f;
    if (cfg.solver == SolverKind::LowRank) {
      LowRankState st = load_state(cfg.ic_file, grid);
      f = reconstruct_f(st, Eigen::MatrixXd::Zero(grid.total_nx(), cfg.d), grid);
    } else {
      f = load_full(cfg.ic_file, grid);
    }
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(grid.total_nx());
    for (Eigen::Index q = 0; q < grid.total_nv(); ++q)
      rho += grid.v_weights()(q) * f.col(q);
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(grid.total_nx(), rho.mean());
    PoissonResult pr = solve_poisson(rho, eta, grid);
    data.f0 = f;
    data.g0 = quotient(f, pr.E, grid);
    data.field.E = pr.E;
    data.field.J = Eigen::MatrixXd::Zero(grid.total_nx(), cfg.d);
    data.field.rho = rho;
    data.field.eta = pr.eta;
    return data;
  }

  // local equilibrium samples f0 around the solution of Poisson's equation
  // for the analytic density, so the field is computed in a pre-pass
  std::optional<Eigen::MatrixXd> E_pre;
  if (cfg.ic == ICKind::LocalEquilibrium) {
    Eigen::VectorXd rho0(grid.total_nx()), eta0(grid.total_nx());
    const double s2pi = std::sqrt(2.0 * M_PI);
    for (Eigen::Index p = 0; p < grid.total_nx(); ++p) {
      const double x = grid.x_coord(p)[0];
      rho0(p) = s2pi / 2.0 * (2.0 + std::cos(2.0 * M_PI * x));
      eta0(p) = s2pi / 1.2661 * std::exp(std::cos(2.0 * M_PI * x));
    }
    E_pre = solve_poisson(rho0, eta0, grid).E;
  }

  ICDefinition ic = make_ic(cfg, grid, E_pre ? &*E_pre : nullptr);
  data.f0 = sample_f(ic, grid);
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(grid.total_nx());
  for (Eigen::Index q = 0; q < grid.total_nv(); ++q)
    rho += grid.v_weights()(q) * data.f0.col(q);

  Eigen::VectorXd eta = sample_eta(ic, grid);
  if (cfg.ic == ICKind::PotentialHill2D) {
    // constant background on its support, carrying the same total charge
    const double support = eta.sum();
    eta *= rho.sum() / support;
  }
  PoissonResult pr = solve_poisson(rho, eta, grid);
  data.g0 = quotient(data.f0, pr.E, grid);
  data.field.E = pr.E;
  data.field.J = Eigen::MatrixXd::Zero(grid.total_nx(), cfg.d);
  data.field.rho = rho;
  data.field.eta = pr.eta;
  return data;
}

RunResult run_experiment(const ExperimentConfig& cfg, bool write_outputs) {
  const auto t_begin = Clock::now();
  InitialData data = build_initial_data(cfg);
  const Grid& grid = data.grid;
  const double dt = cfg.resolved_dt();
  const int steps = static_cast<int>(std::lround(cfg.t_final / dt));

  std::string snapdir;
  if (write_outputs) {
    fs::create_directories(cfg.output + "/snapshots");
    fs::create_directories(cfg.output + "/plots");
    snapdir = cfg.output + "/snapshots";
  }
  auto snapshot_name = [&](const char* stem, int n) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s/%s_%06d", snapdir.c_str(), stem, n);
    return std::string(buf);
  };

  RunResult result;

  if (cfg.solver == SolverKind::LowRank) {
    LowRankState st;
    if (cfg.ic == ICKind::Custom)
      st = load_state(cfg.ic_file, grid);
    else
      st = init_from_samples(data.g0, cfg.r, grid);
    StepOptions opt;
    opt.dt = dt;
    opt.epsilon = cfg.epsilon;
    opt.gmres = cfg.gmres;
    Stepper stepper(grid, opt);

    Moments m0 = macroscopic_moments(st, data.field.E, grid, stepper.convolver());
    data.field.rho = m0.rho;
    data.field.J = m0.J;
    result.history.append(
        0.0, singular_values(st), m0.rho.sum() * grid.x_weight(),
        gauss_residual(data.field.E, m0.rho, data.field.eta, grid),
        maxwellian_distance(st, data.field.E, grid, stepper.convolver()), 0.0);

    for (int n = 1; n <= steps; ++n) {
      StepReport rep = stepper.advance(st, data.field);
      if (rep.cfl_warning)
        std::fprintf(stderr, "warning: CFL exceeded at step %d\n", n);
      const double maxw =
          maxwellian_distance(st, data.field.E, grid, stepper.convolver());
      result.history.append(n * dt, rep.sigma, rep.mass, rep.gauss_residual,
                            maxw, rep.ms_total);
      if (write_outputs && cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0) {
        save_state(snapshot_name("state", n) + ".kdlr", st, grid);
        write_field_csv(snapshot_name("field", n) + ".csv", data.field, grid);
      }
    }
    if (write_outputs)
      save_state(cfg.output + "/final.kdlr", st, grid);
    result.state = std::move(st);
  } else if (cfg.solver == SolverKind::FullTensor) {
    Eigen::MatrixXd g = data.g0;
    FullTensorSolver::Options opt;
    opt.dt = dt;
    opt.epsilon = cfg.epsilon;
    opt.gmres = cfg.gmres;
    FullTensorSolver solver(grid, opt);

    Moments m0 = solver.moments(g, data.field.E);
    result.history.append(
        0.0, Eigen::VectorXd(), m0.rho.sum() * grid.x_weight(),
        gauss_residual(data.field.E, m0.rho, data.field.eta, grid),
        maxwellian_distance_full(solver.distribution(g, data.field.E),
                                 data.field.E, grid),
        0.0);
    for (int n = 1; n <= steps; ++n) {
      const auto t0 = Clock::now();
      solver.step(g, data.field);
      const double ms =
          std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      Moments mom = solver.moments(g, data.field.E);
      data.field.rho = mom.rho;
      data.field.J = mom.J;
      result.history.append(
          n * dt, Eigen::VectorXd(), mom.rho.sum() * grid.x_weight(),
          gauss_residual(data.field.E, mom.rho, data.field.eta, grid),
          maxwellian_distance_full(solver.distribution(g, data.field.E),
                                   data.field.E, grid),
          ms);
      if (write_outputs && cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0) {
        save_full(snapshot_name("full", n) + ".kdlr",
                  solver.distribution(g, data.field.E), grid);
        write_field_csv(snapshot_name("field", n) + ".csv", data.field, grid);
      }
    }
    if (write_outputs)
      save_full(cfg.output + "/final.kdlr", solver.distribution(g, data.field.E),
                grid);
    result.g = std::move(g);
  } else {
    Eigen::VectorXd rho = data.field.rho;
    Eigen::MatrixXd E = data.field.E;
    result.history.append(0.0, Eigen::VectorXd(), rho.sum() * grid.x_weight(),
                          gauss_residual(E, rho, data.field.eta, grid), 0.0,
                          0.0);
    for (int n = 1; n <= steps; ++n) {
      const auto t0 = Clock::now();
      fluid_step(rho, E, grid, dt);
      const double ms =
          std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      result.history.append(n * dt, Eigen::VectorXd(),
                            rho.sum() * grid.x_weight(),
                            gauss_residual(E, rho, data.field.eta, grid), 0.0,
                            ms);
      if (write_outputs && cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0) {
        data.field.rho = rho;
        data.field.E = E;
        write_field_csv(snapshot_name("fluid", n) + ".csv", data.field, grid);
      }
    }
    data.field.rho = rho;
    data.field.E = E;
    result.rho = std::move(rho);
  }

  result.field = std::move(data.field);
  if (write_outputs) {
    std::ofstream csv(cfg.output + "/history.csv");
    write_history_csv(result.history, csv);
    write_history_plot(cfg.output, result.history.rank);
  }
  result.elapsed_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t_begin).count();
  return result;
}

ConvergenceResult run_convergence(const ExperimentConfig& cfg,
                                  bool write_outputs) {
  if (cfg.solver == SolverKind::Fluid)
    throw ConfigError("run_convergence: phase-space solvers only");

  std::vector<int> grids;
  {
    std::istringstream in(cfg.conv_grids);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      try {
        grids.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw ConfigError("run_convergence: bad grid size '" + tok + "'");
      }
    }
  }
  if (grids.size() < 3)
    throw ConfigError("run_convergence: need at least 3 grid sizes");
  for (std::size_t i = 0; i + 1 < grids.size(); ++i)
    if (grids[i + 1] <= grids[i] || grids[i + 1] % grids[i] != 0)
      throw ConfigError("run_convergence: grid sizes must increase by integer "
                        "factors");

  auto final_f = [&](int nx, int nv, Grid& gout) {
    ExperimentConfig c = cfg;
    c.nx = nx;
    c.nv = nv;
    RunResult res = run_experiment(c, false);
    Grid g(c.d, 0.0, 1.0, nx, c.v_lo, c.v_hi, nv);
    gout = g;
    if (cfg.solver == SolverKind::LowRank)
      return reconstruct_f(*res.state, res.field->E, g);
    FullTensorSolver::Options opt;
    opt.dt = c.resolved_dt();
    opt.epsilon = c.epsilon;
    FullTensorSolver solver(g, opt);
    return solver.distribution(*res.g, res.field->E);
  };

  ConvergenceResult out;
  out.grids = grids;
  const int finest = grids.back();

  std::vector<Eigen::MatrixXd> fx;
  std::vector<Grid> gx;
  for (int n : grids) {
    Grid g(1, 0.0, 1.0, 4, -1.0, 1.0, 4);
    fx.push_back(final_f(n, finest, g));
    gx.push_back(g);
  }
  std::vector<double> hx;
  for (std::size_t i = 0; i + 1 < fx.size(); ++i) {
    out.diffs_x.push_back(l1_diff(fx[i], gx[i], fx[i + 1], gx[i + 1]));
    hx.push_back(1.0 / grids[i]);
  }
  out.slope_x = observed_order(hx, out.diffs_x);
  fx.clear();
  gx.clear();

  std::vector<Eigen::MatrixXd> fv;
  std::vector<Grid> gv;
  for (int n : grids) {
    Grid g(1, 0.0, 1.0, 4, -1.0, 1.0, 4);
    fv.push_back(final_f(finest, n, g));
    gv.push_back(g);
  }
  std::vector<double> hv;
  for (std::size_t i = 0; i + 1 < fv.size(); ++i) {
    out.diffs_v.push_back(l1_diff(fv[i], gv[i], fv[i + 1], gv[i + 1]));
    hv.push_back((cfg.v_hi - cfg.v_lo) / (grids[i] - 1));
  }
  out.slope_v = observed_order(hv, out.diffs_v);

  if (write_outputs) {
    fs::create_directories(cfg.output + "/plots");
    auto dump = [&](const char* name, const std::vector<double>& h,
                    const std::vector<double>& diffs) {
      std::ofstream csv(cfg.output + "/" + name);
      csv << "n,h,l1_diff\n";
      char buf[32];
      for (std::size_t i = 0; i < diffs.size(); ++i) {
        csv << grids[i] << ",";
        std::snprintf(buf, sizeof buf, "%.17g", h[i]);
        csv << buf << ",";
        std::snprintf(buf, sizeof buf, "%.17g", diffs[i]);
        csv << buf << "\n";
      }
    };
    dump("convergence_x.csv", hx, out.diffs_x);
    dump("convergence_v.csv", hv, out.diffs_v);
    std::ofstream slopes(cfg.output + "/slopes.txt");
    slopes << "x sweep slope " << out.slope_x << "\n"
           << "v sweep slope " << out.slope_v << "\n";
    write_convergence_plot(cfg.output);
  }
  return out;
}

BenchResult run_bench(const ExperimentConfig& cfg, bool write_outputs) {
  InitialData data = build_initial_data(cfg);
  const Grid& grid = data.grid;
  const double dt = cfg.resolved_dt();
  const int steps = std::max(cfg.bench_steps, 1);

  std::vector<double> ms;
  ms.reserve(steps);
  auto timed = [&](auto&& body) {
    body(); // warmup, excluded
    for (int n = 0; n < steps; ++n) {
      const auto t0 = Clock::now();
      body();
      ms.push_back(
          std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    }
  };

  if (cfg.solver == SolverKind::LowRank) {
    LowRankState st = init_from_samples(data.g0, cfg.r, grid);
    StepOptions opt;
    opt.dt = dt;
    opt.epsilon = cfg.epsilon;
    opt.gmres = cfg.gmres;
    Stepper stepper(grid, opt);
    timed([&] { stepper.advance(st, data.field); });
  } else if (cfg.solver == SolverKind::FullTensor) {
    Eigen::MatrixXd g = data.g0;
    FullTensorSolver::Options opt;
    opt.dt = dt;
    opt.epsilon = cfg.epsilon;
    opt.gmres = cfg.gmres;
    FullTensorSolver solver(grid, opt);
    timed([&] { solver.step(g, data.field); });
  } else {
    Eigen::VectorXd rho = data.field.rho;
    Eigen::MatrixXd E = data.field.E;
    timed([&] { fluid_step(rho, E, grid, dt); });
  }

  std::sort(ms.begin(), ms.end());
  BenchResult out;
  out.steps = steps;
  out.median_step_ms = ms[ms.size() / 2];
  if (write_outputs) {
    fs::create_directories(cfg.output);
    std::ofstream csv(cfg.output + "/bench.csv");
    csv << "solver,d,nx,nv,r,steps,median_step_ms\n"
        << solver_name(cfg.solver) << "," << cfg.d << "," << cfg.nx << ","
        << cfg.nv << "," << (cfg.solver == SolverKind::LowRank ? cfg.r : 0)
        << "," << out.steps << "," << out.median_step_ms << "\n";
  }
  return out;
}

} // namespace kdlr

#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "kdlr/grid.hpp"
#include "kdlr/maxwellian.hpp"
#include "kdlr/state.hpp"

namespace kdlr {

/// L1 distance between phase-space samples on two grids that share a domain;
/// the coarser solution is linearly interpolated onto the finer grid and the
/// sum weighted by the fine cell measure dx^d dv^d. Grid B must refine grid A
/// by an integer points-per-axis factor (or be equal).
double l1_diff(const Eigen::MatrixXd& fA, const Grid& gridA,
               const Eigen::MatrixXd& fB, const Grid& gridB);

/// Same for densities over the x-grid alone.
double l1_diff_density(const Eigen::VectorXd& rhoA, const Grid& gridA,
                       const Eigen::VectorXd& rhoB, const Grid& gridB);

/// Least-squares slope of log(error) against log(h). Non-positive errors are
/// excluded (with a note on stderr); at least two valid points are required.
double observed_order(const std::vector<double>& h,
                      const std::vector<double>& errors);

/// || f - rho M(E) ||_L1, the distance to the local equilibrium, with rho
/// assembled from the state itself.
double maxwellian_distance(const LowRankState& state, const Eigen::MatrixXd& E,
                           const Grid& grid, const MomentConvolver& conv);

/// Full-tensor variant taking f samples directly.
double maxwellian_distance_full(const Eigen::MatrixXd& f, const Eigen::MatrixXd& E,
                                const Grid& grid);

/// Per-step time series of a run. Appended by the experiment driver and
/// written as CSV with headers t,sigma1..sigmaR,mass,gauss_res,maxw_dist,wall_ms.
struct RunHistory {
  int rank = 0; // number of sigma columns
  std::vector<double> t;
  std::vector<Eigen::VectorXd> sigma;
  std::vector<double> mass;
  std::vector<double> gauss_res;
  std::vector<double> maxw_dist;
  std::vector<double> wall_ms;

  void append(double time, const Eigen::VectorXd& sig, double m, double gauss,
              double maxw, double ms);
  std::size_t size() const { return t.size(); }
};

/// 17-significant-digit CSV emission.
void write_history_csv(const RunHistory& history, std::ostream& out);

} // namespace kdlr

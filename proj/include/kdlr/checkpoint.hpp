#pragma once

#include <string>

#include <Eigen/Core>

#include "kdlr/grid.hpp"
#include "kdlr/state.hpp"

namespace kdlr {

// Binary checkpoint format, little-endian:
//   magic "KDLR" | version u32 | d u64 | Nx u64 | Nv u64 | r u64
//   X row-major f64 (Nx x r) | S row-major (r x r) | V row-major (Nv x r)
// Full-tensor checkpoints use the same header with the r field omitted,
// followed by the phase-space samples row-major (Nx x Nv).

void save_state(const std::string& path, const LowRankState& state,
                const Grid& grid);
LowRankState load_state(const std::string& path, const Grid& grid);

void save_full(const std::string& path, const Eigen::MatrixXd& f,
               const Grid& grid);
Eigen::MatrixXd load_full(const std::string& path, const Grid& grid);

} // namespace kdlr

#include "kdlr/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "kdlr/errors.hpp"

namespace kdlr {

namespace {

constexpr char kMagic[4] = {'K', 'D', 'L', 'R'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

// row-major f64 payloads (Eigen stores column-major)
void write_matrix(std::ostream& out, const Eigen::MatrixXd& A) {
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      const double v = A(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
}

void read_matrix(std::istream& in, Eigen::MatrixXd& A) {
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof v);
      A(i, j) = v;
    }
}

void check_header(std::istream& in, const std::string& path, const Grid& grid) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError("checkpoint: bad magic in '" + path + "'");
  if (read_u32(in) != kVersion)
    throw ConfigError("checkpoint: unsupported version in '" + path + "'");
  if (read_u64(in) != static_cast<std::uint64_t>(grid.dim()) ||
      read_u64(in) != static_cast<std::uint64_t>(grid.total_nx()) ||
      read_u64(in) != static_cast<std::uint64_t>(grid.total_nv()))
    throw ConfigError("checkpoint: grid mismatch in '" + path + "'");
}

} // namespace

void save_state(const std::string& path, const LowRankState& state,
                const Grid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ConfigError("checkpoint: cannot write '" + path + "'");
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u64(out, grid.dim());
  write_u64(out, grid.total_nx());
  write_u64(out, grid.total_nv());
  write_u64(out, state.rank());
  write_matrix(out, state.X);
  write_matrix(out, state.S);
  write_matrix(out, state.V);
  if (!out)
    throw ConfigError("checkpoint: write failed for '" + path + "'");
}

LowRankState load_state(const std::string& path, const Grid& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("checkpoint: cannot open '" + path + "'");
  check_header(in, path, grid);
  const std::uint64_t r = read_u64(in);
  if (r < 1 || r > static_cast<std::uint64_t>(
                      std::min(grid.total_nx(), grid.total_nv())))
    throw ConfigError("checkpoint: bad rank in '" + path + "'");
  LowRankState st;
  st.X.resize(grid.total_nx(), r);
  st.S.resize(r, r);
  st.V.resize(grid.total_nv(), r);
  read_matrix(in, st.X);
  read_matrix(in, st.S);
  read_matrix(in, st.V);
  if (!in)
    throw ConfigError("checkpoint: truncated file '" + path + "'");
  return st;
}

void save_full(const std::string& path, const Eigen::MatrixXd& f,
               const Grid& grid) {
  if (f.rows() != grid.total_nx() || f.cols() != grid.total_nv())
    throw ConfigError("checkpoint: sample shape does not match grid");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ConfigError("checkpoint: cannot write '" + path + "'");
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u64(out, grid.dim());
  write_u64(out, grid.total_nx());
  write_u64(out, grid.total_nv());
  write_matrix(out, f);
  if (!out)
    throw ConfigError("checkpoint: write failed for '" + path + "'");
}

Eigen::MatrixXd load_full(const std::string& path, const Grid& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("checkpoint: cannot open '" + path + "'");
  check_header(in, path, grid);
  Eigen::MatrixXd f(grid.total_nx(), grid.total_nv());
  read_matrix(in, f);
  if (!in)
    throw ConfigError("checkpoint: truncated file '" + path + "'");
  return f;
}

} // namespace kdlr

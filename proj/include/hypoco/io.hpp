#pragma once

// Plain-text exports: hitting times, grid fields, sparse matrices (row, col,
// value) and weight vectors.

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "hypoco/errors.hpp"
#include "hypoco/grid.hpp"
#include "hypoco/montecarlo.hpp"

namespace hypoco::io {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw ConfigurationError("cannot open " + path.string() + " for writing");
  os.precision(17);
  return os;
}

inline void write_hitting_csv(const std::filesystem::path& path, std::span<const HittingSample> samples) {
  auto os = open_for_write(path);
  os << "index,time,censored,t_cap\n";
  for (std::size_t i = 0; i < samples.size(); ++i)
    os << i << ',' << samples[i].time << ',' << (samples[i].censored ? 1 : 0) << ',' << samples[i].t_cap << '\n';
}

/// One row per cell: x, v (or u), value.
inline void write_grid_csv(const std::filesystem::path& path, const GridOperator& g, const Vec& values,
                           const std::string& name) {
  auto os = open_for_write(path);
  os << "x," << (g.kind == GridKind::RTorus ? "u" : "v") << ',' << name << '\n';
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nv; ++j) os << g.xc[i] << ',' << g.vc[j] << ',' << values[g.index(i, j)] << '\n';
}

inline void write_coo(const std::filesystem::path& path, const SpMat& M) {
  auto os = open_for_write(path);
  os << "# rows " << M.rows() << " cols " << M.cols() << " nnz " << M.nonZeros() << '\n';
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

inline void write_weights(const std::filesystem::path& path, const Vec& w) {
  auto os = open_for_write(path);
  for (int a = 0; a < w.size(); ++a) os << w[a] << '\n';
}

}  // namespace hypoco::io

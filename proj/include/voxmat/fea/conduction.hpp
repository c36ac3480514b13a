#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "voxmat/fea/elastic.hpp"
#include "voxmat/fea/element.hpp"
#include "voxmat/fea/solver.hpp"
#include "voxmat/voxel_grid.hpp"

namespace voxmat {
namespace fea {

struct ConductionTensor {
  Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
  double k_avg = 0.0;
};

struct ConductionResult {
  ConductionTensor tensor;
  std::vector<SolveStats> stats;
};

// Scalar cell-problem homogenization: three unit macroscopic gradients on the
// same periodic voxel lattice as the elastic solver. The result is exactly
// linear in the base conductivity (the solve runs at unit conductivity), so
// thermal and electrical share one geometry kernel.
inline ConductionResult conduction_homogenize(const VoxelGrid& grid,
                                              double base_conductivity,
                                              const SolverConfig& cfg) {
  if (!(base_conductivity > 0.0))
    throw std::invalid_argument("base_conductivity must be > 0");
  cfg.validate();

  const int n = grid.resolution();
  const std::size_t n_nodes = grid.cell_count();
  const double h = 1.0 / n;

  const ScalarElement elem = make_scalar_element(h);
  const auto nodes = detail::build_element_nodes(n);
  const auto scale = detail::element_scales(grid, cfg.ersatz_stiffness);
  const std::size_t n_elems = nodes.size();

  std::vector<double> inv_diag(n_nodes, 0.0);
  for (std::size_t e = 0; e < n_elems; ++e)
    for (int l = 0; l < 8; ++l)
      inv_diag[static_cast<std::size_t>(nodes[e][l])] += scale[e] * elem.K0(l, l);
  for (double& d : inv_diag) d = 1.0 / d;

  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    Vector8 xe, ye;
    for (std::size_t e = 0; e < n_elems; ++e) {
      const auto& nd = nodes[e];
      for (int l = 0; l < 8; ++l) xe(l) = x[static_cast<std::size_t>(nd[l])];
      ye.noalias() = scale[e] * (elem.K0 * xe);
      for (int l = 0; l < 8; ++l) y[static_cast<std::size_t>(nd[l])] += ye(l);
    }
  };

  auto project = [n_nodes](std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n_nodes);
    for (double& x : v) x -= mean;
  };

  ConductionResult result;
  std::array<std::vector<double>, 3> solutions;
  for (int m = 0; m < 3; ++m) {
    std::vector<double> f(n_nodes, 0.0);
    for (std::size_t e = 0; e < n_elems; ++e) {
      const auto& nd = nodes[e];
      for (int l = 0; l < 8; ++l)
        f[static_cast<std::size_t>(nd[l])] += scale[e] * elem.f0[m](l);
    }
    solutions[m].resize(n_nodes);
    result.stats.push_back(pcg(n_nodes, apply, inv_diag, f, solutions[m], cfg,
                               project, "conduction load case " + std::to_string(m + 1)));
  }

  Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
  Eigen::Matrix<double, 8, 3> D;
  for (std::size_t e = 0; e < n_elems; ++e) {
    const auto& nd = nodes[e];
    for (int m = 0; m < 3; ++m)
      for (int l = 0; l < 8; ++l)
        D(l, m) = elem.chi0[m](l) - solutions[m][static_cast<std::size_t>(nd[l])];
    K.noalias() += scale[e] * (D.transpose() * (elem.K0 * D));
  }

  K *= base_conductivity;
  K = 0.5 * (K + K.transpose()).eval();
  result.tensor.K = K;
  result.tensor.k_avg = K.trace() / 3.0;
  return result;
}

}  // namespace fea
}  // namespace voxmat

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "voxmat/fea/element.hpp"
#include "voxmat/fea/solver.hpp"
#include "voxmat/material.hpp"
#include "voxmat/property.hpp"
#include "voxmat/voxel_grid.hpp"

namespace voxmat {
namespace fea {

struct ElasticTensor {
  Eigen::Matrix<double, 6, 6> C = Eigen::Matrix<double, 6, 6>::Zero();
};

struct ElasticResult {
  ElasticTensor tensor;
  std::vector<SolveStats> stats;
};

struct EngineeringConstants {
  double Ex = 0, Ey = 0, Ez = 0;
  double Gxy = 0, Gxz = 0, Gyz = 0;
  double nu_xy = 0, nu_xz = 0, nu_yz = 0;
  double E_avg = 0, G_avg = 0, nu_avg = 0;
  double condition_number = 0;
};

struct SingularTensorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Node connectivity of every voxel element under periodic wraparound.
inline std::vector<std::array<std::int32_t, 8>> build_element_nodes(int n) {
  const auto& offsets = hex_node_offsets();
  std::vector<std::array<std::int32_t, 8>> nodes(
      static_cast<std::size_t>(n) * n * n);
  std::vector<int> wrap(n + 1);
  for (int i = 0; i <= n; ++i) wrap[i] = i % n;
  std::size_t e = 0;
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x, ++e)
        for (int l = 0; l < 8; ++l) {
          const int nx = wrap[x + offsets[l][0]];
          const int ny = wrap[y + offsets[l][1]];
          const int nz = wrap[z + offsets[l][2]];
          nodes[e][l] =
              static_cast<std::int32_t>(nx + n * (ny + static_cast<std::size_t>(n) * nz));
        }
  return nodes;
}

inline std::vector<double> element_scales(const VoxelGrid& grid, double ersatz) {
  const int n = grid.resolution();
  std::vector<double> scale(grid.cell_count());
  std::size_t e = 0;
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x, ++e)
        scale[e] = grid.solid(x, y, z) ? 1.0 : ersatz;
  return scale;
}

}  // namespace detail

// Periodic-cell elasticity homogenization on the voxel lattice: six unit
// macroscopic strain cases solved matrix-free with Jacobi-preconditioned CG,
// void voxels treated as ersatz material. The base modulus enters by linear
// scaling of the result, so the solve itself runs at unit Young's modulus.
inline ElasticResult elastic_homogenize(const VoxelGrid& grid,
                                        const MaterialParams& material,
                                        const SolverConfig& cfg) {
  material.validate();
  cfg.validate();

  const int n = grid.resolution();
  const std::size_t n_nodes = grid.cell_count();
  const std::size_t n_dof = 3 * n_nodes;
  const double h = 1.0 / n;

  const ElasticElement elem = make_elastic_element(material.poisson_base, h);
  const auto nodes = detail::build_element_nodes(n);
  const auto scale = detail::element_scales(grid, cfg.ersatz_stiffness);
  const std::size_t n_elems = nodes.size();

  // Jacobi diagonal.
  std::vector<double> inv_diag(n_dof, 0.0);
  for (std::size_t e = 0; e < n_elems; ++e)
    for (int l = 0; l < 8; ++l)
      for (int c = 0; c < 3; ++c)
        inv_diag[3 * static_cast<std::size_t>(nodes[e][l]) + c] +=
            scale[e] * elem.K0(3 * l + c, 3 * l + c);
  for (double& d : inv_diag) d = 1.0 / d;

  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    Vector24 xe, ye;
    for (std::size_t e = 0; e < n_elems; ++e) {
      const auto& nd = nodes[e];
      for (int l = 0; l < 8; ++l) {
        const std::size_t base = 3 * static_cast<std::size_t>(nd[l]);
        xe(3 * l + 0) = x[base + 0];
        xe(3 * l + 1) = x[base + 1];
        xe(3 * l + 2) = x[base + 2];
      }
      ye.noalias() = scale[e] * (elem.K0 * xe);
      for (int l = 0; l < 8; ++l) {
        const std::size_t base = 3 * static_cast<std::size_t>(nd[l]);
        y[base + 0] += ye(3 * l + 0);
        y[base + 1] += ye(3 * l + 1);
        y[base + 2] += ye(3 * l + 2);
      }
    }
  };

  // Rigid translations span the nullspace; remove the mean per component.
  auto project = [n_nodes](std::vector<double>& v) {
    double mean[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n_nodes; ++i) {
      mean[0] += v[3 * i + 0];
      mean[1] += v[3 * i + 1];
      mean[2] += v[3 * i + 2];
    }
    for (double& m : mean) m /= static_cast<double>(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
      v[3 * i + 0] -= mean[0];
      v[3 * i + 1] -= mean[1];
      v[3 * i + 2] -= mean[2];
    }
  };

  ElasticResult result;
  std::array<std::vector<double>, 6> solutions;
  for (int m = 0; m < 6; ++m) {
    std::vector<double> f(n_dof, 0.0);
    for (std::size_t e = 0; e < n_elems; ++e) {
      const auto& nd = nodes[e];
      for (int l = 0; l < 8; ++l) {
        const std::size_t base = 3 * static_cast<std::size_t>(nd[l]);
        f[base + 0] += scale[e] * elem.f0[m](3 * l + 0);
        f[base + 1] += scale[e] * elem.f0[m](3 * l + 1);
        f[base + 2] += scale[e] * elem.f0[m](3 * l + 2);
      }
    }
    solutions[m].resize(n_dof);
    result.stats.push_back(pcg(n_dof, apply, inv_diag, f, solutions[m], cfg,
                               project, "elastic load case " + std::to_string(m + 1)));
  }

  // C^H_mp = sum_e s_e (chi0_m - u_m)^T K0 (chi0_p - u_p) over the unit cell.
  Eigen::Matrix<double, 6, 6> C = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 24, 6> D;
  for (std::size_t e = 0; e < n_elems; ++e) {
    const auto& nd = nodes[e];
    for (int m = 0; m < 6; ++m) {
      const auto& u = solutions[m];
      for (int l = 0; l < 8; ++l) {
        const std::size_t base = 3 * static_cast<std::size_t>(nd[l]);
        D(3 * l + 0, m) = elem.chi0[m](3 * l + 0) - u[base + 0];
        D(3 * l + 1, m) = elem.chi0[m](3 * l + 1) - u[base + 1];
        D(3 * l + 2, m) = elem.chi0[m](3 * l + 2) - u[base + 2];
      }
    }
    C.noalias() += scale[e] * (D.transpose() * (elem.K0 * D));
  }

  C *= material.young_modulus_base;  // solve ran at unit modulus
  C = 0.5 * (C + C.transpose()).eval();
  result.tensor.C = C;
  return result;
}

// Engineering constants from the compliance S = C^-1 (Voigt order
// 11,22,33,23,13,12): Ex = 1/S11, Gyz = 1/S44, nu_xy = -S12/S11, etc.
inline EngineeringConstants engineering_constants(const ElasticTensor& tensor) {
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(tensor.C);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(5);
  if (!(smin > 0.0) || !std::isfinite(smax / smin))
    throw SingularTensorError("elastic tensor is numerically singular");

  const Eigen::Matrix<double, 6, 6> S = tensor.C.inverse();
  EngineeringConstants ec;
  ec.condition_number = smax / smin;
  ec.Ex = 1.0 / S(0, 0);
  ec.Ey = 1.0 / S(1, 1);
  ec.Ez = 1.0 / S(2, 2);
  ec.Gyz = 1.0 / S(3, 3);
  ec.Gxz = 1.0 / S(4, 4);
  ec.Gxy = 1.0 / S(5, 5);
  ec.nu_xy = -S(0, 1) / S(0, 0);
  ec.nu_xz = -S(0, 2) / S(0, 0);
  ec.nu_yz = -S(1, 2) / S(1, 1);
  ec.E_avg = (ec.Ex + ec.Ey + ec.Ez) / 3.0;
  ec.G_avg = (ec.Gxy + ec.Gxz + ec.Gyz) / 3.0;
  ec.nu_avg = (ec.nu_xy + ec.nu_xz + ec.nu_yz) / 3.0;
  return ec;
}

}  // namespace fea
}  // namespace voxmat

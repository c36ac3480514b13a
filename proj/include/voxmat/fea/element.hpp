#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "voxmat/material.hpp"

namespace voxmat {
namespace fea {

// Local node order of the trilinear hexahedron. Node l sits at the corner
// offsets_(l) * h of the voxel; shape function N_l = (1/8) Prod (1 + s_i x_i).
inline const std::array<std::array<int, 3>, 8>& hex_node_offsets() {
  static const std::array<std::array<int, 3>, 8> offsets = {{
      {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
      {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
  }};
  return offsets;
}

using Matrix24 = Eigen::Matrix<double, 24, 24>;
using Vector24 = Eigen::Matrix<double, 24, 1>;
using Matrix8 = Eigen::Matrix<double, 8, 8>;
using Vector8 = Eigen::Matrix<double, 8, 1>;

// Precomputed element-level operators for the elastic cell problems on a
// voxel of edge h, at unit Young's modulus. chi0[m] is the nodal displacement
// realizing the m-th unit macroscopic strain (Voigt order 11,22,33,23,13,12
// with engineering shears) and f0[m] = K0 * chi0[m] is the corresponding
// macroscopic load.
struct ElasticElement {
  Matrix24 K0;
  std::array<Vector24, 6> chi0;
  std::array<Vector24, 6> f0;
};

inline ElasticElement make_elastic_element(double poisson, double h) {
  const Eigen::Matrix<double, 6, 6> C = isotropic_stiffness(1.0, poisson);
  const auto& offsets = hex_node_offsets();

  ElasticElement elem;
  elem.K0.setZero();

  const double gp = 1.0 / std::sqrt(3.0);
  const double detJ = (h / 2.0) * (h / 2.0) * (h / 2.0);
  const double dscale = 2.0 / h;  // d/dx = (2/h) d/dxi

  for (int gx = 0; gx < 2; ++gx) {
    for (int gy = 0; gy < 2; ++gy) {
      for (int gz = 0; gz < 2; ++gz) {
        const double xi = gx ? gp : -gp;
        const double eta = gy ? gp : -gp;
        const double zeta = gz ? gp : -gp;

        Eigen::Matrix<double, 6, 24> B = Eigen::Matrix<double, 6, 24>::Zero();
        for (int l = 0; l < 8; ++l) {
          const double sx = offsets[l][0] ? 1.0 : -1.0;
          const double sy = offsets[l][1] ? 1.0 : -1.0;
          const double sz = offsets[l][2] ? 1.0 : -1.0;
          const double dNdx =
              0.125 * sx * (1.0 + sy * eta) * (1.0 + sz * zeta) * dscale;
          const double dNdy =
              0.125 * (1.0 + sx * xi) * sy * (1.0 + sz * zeta) * dscale;
          const double dNdz =
              0.125 * (1.0 + sx * xi) * (1.0 + sy * eta) * sz * dscale;
          const int c = 3 * l;
          B(0, c + 0) = dNdx;
          B(1, c + 1) = dNdy;
          B(2, c + 2) = dNdz;
          B(3, c + 1) = dNdz;  // gamma_yz
          B(3, c + 2) = dNdy;
          B(4, c + 0) = dNdz;  // gamma_xz
          B(4, c + 2) = dNdx;
          B(5, c + 0) = dNdy;  // gamma_xy
          B(5, c + 1) = dNdx;
        }
        elem.K0 += detJ * B.transpose() * C * B;
      }
    }
  }

  for (int m = 0; m < 6; ++m) {
    Vector24 chi = Vector24::Zero();
    for (int l = 0; l < 8; ++l) {
      const double x = offsets[l][0] * h;
      const double y = offsets[l][1] * h;
      const double z = offsets[l][2] * h;
      double u = 0.0, v = 0.0, w = 0.0;
      switch (m) {
        case 0: u = x; break;                           // eps_11 = 1
        case 1: v = y; break;                           // eps_22 = 1
        case 2: w = z; break;                           // eps_33 = 1
        case 3: v = 0.5 * z; w = 0.5 * y; break;        // gamma_23 = 1
        case 4: u = 0.5 * z; w = 0.5 * x; break;        // gamma_13 = 1
        case 5: u = 0.5 * y; v = 0.5 * x; break;        // gamma_12 = 1
      }
      chi(3 * l + 0) = u;
      chi(3 * l + 1) = v;
      chi(3 * l + 2) = w;
    }
    elem.chi0[m] = chi;
    elem.f0[m] = elem.K0 * chi;
  }
  return elem;
}

// Scalar (conduction) analogue at unit conductivity: K0 is the 8x8 element
// Laplacian, chi0[m] the nodal potential of a unit macroscopic gradient along
// axis m.
struct ScalarElement {
  Matrix8 K0;
  std::array<Vector8, 3> chi0;
  std::array<Vector8, 3> f0;
};

inline ScalarElement make_scalar_element(double h) {
  const auto& offsets = hex_node_offsets();
  ScalarElement elem;
  elem.K0.setZero();

  const double gp = 1.0 / std::sqrt(3.0);
  const double detJ = (h / 2.0) * (h / 2.0) * (h / 2.0);
  const double dscale = 2.0 / h;

  for (int gx = 0; gx < 2; ++gx) {
    for (int gy = 0; gy < 2; ++gy) {
      for (int gz = 0; gz < 2; ++gz) {
        const double xi = gx ? gp : -gp;
        const double eta = gy ? gp : -gp;
        const double zeta = gz ? gp : -gp;
        Eigen::Matrix<double, 3, 8> G;
        for (int l = 0; l < 8; ++l) {
          const double sx = offsets[l][0] ? 1.0 : -1.0;
          const double sy = offsets[l][1] ? 1.0 : -1.0;
          const double sz = offsets[l][2] ? 1.0 : -1.0;
          G(0, l) = 0.125 * sx * (1.0 + sy * eta) * (1.0 + sz * zeta) * dscale;
          G(1, l) = 0.125 * (1.0 + sx * xi) * sy * (1.0 + sz * zeta) * dscale;
          G(2, l) = 0.125 * (1.0 + sx * xi) * (1.0 + sy * eta) * sz * dscale;
        }
        elem.K0 += detJ * G.transpose() * G;
      }
    }
  }

  for (int m = 0; m < 3; ++m) {
    Vector8 chi;
    for (int l = 0; l < 8; ++l) chi(l) = offsets[l][m] * h;
    elem.chi0[m] = chi;
    elem.f0[m] = elem.K0 * chi;
  }
  return elem;
}

}  // namespace fea
}  // namespace voxmat

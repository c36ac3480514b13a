#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace voxmat {

// Base (fully dense) material of a microstructure. Stress-like quantities in
// MPa, conductivities in W/(m*K) resp. S/m; everything else dimensionless.
struct MaterialParams {
  double young_modulus_base = 0.0;
  double shear_modulus_base = 0.0;
  double poisson_base = 0.0;
  double thermal_conductivity_base = 0.0;
  double electrical_conductivity_base = 0.0;
  double yield_stress_0 = 0.0;
  double reference_strain_eps0 = 1e-3;
  double hardening_exponent_n = 0.0;
  std::string name;

  void validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
      throw std::invalid_argument("material." + field + ": " + why);
    };
    if (!(young_modulus_base > 0.0)) fail("young_modulus_base", "must be > 0");
    if (!(shear_modulus_base > 0.0)) fail("shear_modulus_base", "must be > 0");
    if (!(poisson_base >= 0.0 && poisson_base < 0.5))
      fail("poisson_base", "must lie in [0, 0.5)");
    if (!(thermal_conductivity_base >= 0.0))
      fail("thermal_conductivity_base", "must be >= 0");
    if (!(electrical_conductivity_base >= 0.0))
      fail("electrical_conductivity_base", "must be >= 0");
    if (!(yield_stress_0 >= 0.0)) fail("yield_stress_0", "must be >= 0");
    if (!(reference_strain_eps0 > 0.0))
      fail("reference_strain_eps0", "must be > 0");
    if (!(hardening_exponent_n >= 0.0))
      fail("hardening_exponent_n", "must be >= 0");
  }
};

// Isotropic stiffness in Voigt notation (11, 22, 33, 23, 13, 12) with
// engineering shear strains, so C44 = C55 = C66 = G.
inline Eigen::Matrix<double, 6, 6> isotropic_stiffness(double young,
                                                       double poisson) {
  const double lambda =
      young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  const double mu = young / (2.0 * (1.0 + poisson));
  Eigen::Matrix<double, 6, 6> c = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) c(i, j) = lambda;
    c(i, i) = lambda + 2.0 * mu;
    c(i + 3, i + 3) = mu;
  }
  return c;
}

}  // namespace voxmat

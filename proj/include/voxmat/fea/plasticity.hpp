#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "voxmat/fea/elastic.hpp"
#include "voxmat/material.hpp"

namespace voxmat {
namespace fea {

// Material-point state for J2 plasticity. Stresses in MPa, plastic work in
// MJ/m^3 (MPa times strain).
struct PlasticState {
  Eigen::Matrix3d stress = Eigen::Matrix3d::Zero();
  double eq_plastic_strain = 0.0;
  double plastic_work = 0.0;
};

// Swift hardening law sigma_y = sigma_y0 (1 + epbar/eps0)^n.
inline double swift_yield(const MaterialParams& material, double eq_plastic_strain,
                          double yield_scale = 1.0) {
  return yield_scale * material.yield_stress_0 *
         std::pow(1.0 + eq_plastic_strain / material.reference_strain_eps0,
                  material.hardening_exponent_n);
}

inline double von_mises(const Eigen::Matrix3d& stress) {
  const Eigen::Matrix3d s =
      stress - (stress.trace() / 3.0) * Eigen::Matrix3d::Identity();
  return std::sqrt(1.5 * (s.array() * s.array()).sum());
}

struct PlasticityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Radial return for one strain increment on the isotropic idealization of the
// homogenized medium (E_avg, nu_avg). Steps: elastic trial, yield check,
// scalar Newton on the consistency equation
//   sigma_vm_trial - 3 G dgamma = sigma_y(epbar + dgamma)
// to |dgamma - dgamma_prev| < 1e-8, deviator scaling, hydrostatic part kept
// elastic. Plastic work accumulates by the trapezoid rule.
inline PlasticState radial_return(const PlasticState& state,
                                  const Eigen::Matrix3d& strain_increment,
                                  const MaterialParams& material,
                                  const EngineeringConstants& elastic,
                                  double yield_scale = 1.0) {
  constexpr double kNewtonTol = 1e-8;
  constexpr int kNewtonMaxIter = 100;

  const double E = elastic.E_avg;
  const double nu = elastic.nu_avg;
  if (!(E > 0.0) || !(nu >= 0.0 && nu < 0.5))
    throw std::invalid_argument("radial_return: elastic constants out of range");
  const double G = E / (2.0 * (1.0 + nu));
  const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));

  const Eigen::Matrix3d dstress =
      lambda * strain_increment.trace() * Eigen::Matrix3d::Identity() +
      2.0 * G * strain_increment;
  const Eigen::Matrix3d trial = state.stress + dstress;

  const Eigen::Matrix3d s_trial =
      trial - (trial.trace() / 3.0) * Eigen::Matrix3d::Identity();
  const double vm_trial = std::sqrt(1.5 * (s_trial.array() * s_trial.array()).sum());

  PlasticState next = state;
  const double yield_now = swift_yield(material, state.eq_plastic_strain, yield_scale);
  if (vm_trial - yield_now <= 0.0) {
    next.stress = trial;
    return next;
  }

  // Newton iteration for the plastic multiplier.
  double dgamma = 0.0;
  double prev = dgamma;
  int iter = 0;
  for (; iter < kNewtonMaxIter; ++iter) {
    const double epbar = state.eq_plastic_strain + dgamma;
    const double sy = swift_yield(material, epbar, yield_scale);
    const double residual = vm_trial - 3.0 * G * dgamma - sy;
    const double hardening =
        yield_scale * material.yield_stress_0 * material.hardening_exponent_n /
        material.reference_strain_eps0 *
        std::pow(1.0 + epbar / material.reference_strain_eps0,
                 material.hardening_exponent_n - 1.0);
    const double slope = -3.0 * G - hardening;
    prev = dgamma;
    dgamma -= residual / slope;
    if (dgamma < 0.0) dgamma = 0.5 * prev;  // safeguard for overshoot
    if (std::abs(dgamma - prev) < kNewtonTol) break;
  }
  if (iter == kNewtonMaxIter) {
    const double residual =
        vm_trial - 3.0 * G * dgamma -
        swift_yield(material, state.eq_plastic_strain + dgamma, yield_scale);
    throw PlasticityError("radial return Newton did not converge (residual " +
                          std::to_string(residual) + ")");
  }
  if (dgamma < 0.0)
    throw std::logic_error("radial return produced a negative plastic multiplier");

  const double factor = 1.0 - 3.0 * G * dgamma / vm_trial;
  const Eigen::Matrix3d s_new = factor * s_trial;
  next.stress = s_new + (trial.trace() / 3.0) * Eigen::Matrix3d::Identity();
  const double epbar_new = state.eq_plastic_strain + dgamma;
  next.plastic_work =
      state.plastic_work +
      0.5 *
          (swift_yield(material, state.eq_plastic_strain, yield_scale) +
           swift_yield(material, epbar_new, yield_scale)) *
          dgamma;
  next.eq_plastic_strain = epbar_new;
  return next;
}

// Plastic work absorbed along the committed strain path for the Wp property:
// a 20-step uniaxial strain ramp to 5% on the homogenized medium, with the
// initial yield stress scaled by the volume fraction.
inline double plastic_work_uniaxial_ramp(const MaterialParams& material,
                                         const EngineeringConstants& elastic,
                                         double volume_fraction,
                                         int steps = 20,
                                         double strain_total = 0.05) {
  PlasticState state;
  Eigen::Matrix3d dstrain = Eigen::Matrix3d::Zero();
  dstrain(0, 0) = strain_total / steps;
  const double yield_scale = volume_fraction;
  for (int i = 0; i < steps; ++i)
    state = radial_return(state, dstrain, material, elastic, yield_scale);
  return state.plastic_work;
}

}  // namespace fea
}  // namespace voxmat

#pragma once

#include <vector>

#include "voxmat/fea/conduction.hpp"
#include "voxmat/fea/elastic.hpp"
#include "voxmat/fea/plasticity.hpp"
#include "voxmat/property.hpp"
#include "voxmat/task.hpp"
#include "voxmat/voxel_grid.hpp"

namespace voxmat {
namespace fea {

// Runs exactly the simulations the task objectives require. Solves always use
// base-material parameters. Conduction runs once at unit conductivity and is
// scaled for kappa and sigma, so both share one geometry kernel. Disconnected
// grids are still evaluated but flagged infeasible.
inline PropertyVector evaluate_properties(const VoxelGrid& grid,
                                          const TaskSpec& spec,
                                          const SolverConfig& cfg) {
  bool need_elastic = false;
  bool need_conduction_kappa = false;
  bool need_conduction_sigma = false;
  bool need_vf = false;
  bool need_wp = false;
  for (const auto& o : spec.objectives) {
    switch (o.property) {
      case Property::E:
      case Property::G:
      case Property::nu: need_elastic = true; break;
      case Property::kappa: need_conduction_kappa = true; break;
      case Property::sigma: need_conduction_sigma = true; break;
      case Property::vf: need_vf = true; break;
      case Property::Wp: need_wp = true; break;
    }
  }
  if (need_wp) need_elastic = true;  // ramp runs on homogenized constants

  PropertyVector props;
  props.feasible = connectivity_check(grid);

  if (need_vf || need_wp) props.set(Property::vf, volume_fraction(grid));

  EngineeringConstants ec;
  if (need_elastic) {
    ElasticResult res = elastic_homogenize(grid, spec.material, cfg);
    for (auto& s : res.stats) props.solver_stats.push_back(std::move(s));
    ec = engineering_constants(res.tensor);
    props.set(Property::E, ec.E_avg);
    props.set(Property::G, ec.G_avg);
    props.set(Property::nu, ec.nu_avg);
  }

  if (need_conduction_kappa || need_conduction_sigma) {
    ConductionResult res = conduction_homogenize(grid, 1.0, cfg);
    for (auto& s : res.stats) props.solver_stats.push_back(std::move(s));
    const double k_norm = res.tensor.k_avg;
    if (need_conduction_kappa)
      props.set(Property::kappa,
                spec.material.thermal_conductivity_base * k_norm);
    if (need_conduction_sigma)
      props.set(Property::sigma,
                spec.material.electrical_conductivity_base * k_norm);
  }

  if (need_wp) {
    const double vf = props.get(Property::vf);
    props.set(Property::Wp,
              plastic_work_uniaxial_ramp(spec.material, ec, vf));
  }

  return props;
}

}  // namespace fea
}  // namespace voxmat

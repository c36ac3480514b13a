#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxmat/evaluator.hpp"
#include "voxmat/generator.hpp"
#include "voxmat/property.hpp"
#include "voxmat/task.hpp"

namespace voxmat {

// One precomputed design prior: a conditioning point with the properties this
// repository's own simulators measured for it, plus provenance.
struct SeedEntry {
  ConditioningVector x;
  PropertyVector properties;
  int resolution = 0;
  std::string generator_version;
};

// Offline knowledge base used to warm-start the search. Properties are stored
// for a reference material at unit moduli/conductivity and rescaled against
// task targets at retrieval time.
struct SeedLibrary {
  std::vector<SeedEntry> entries;
  MaterialParams reference_material;
  double solver_tol = 0.0;

  static MaterialParams default_reference_material() {
    MaterialParams m;
    m.name = "reference-unit";
    m.young_modulus_base = 1.0;
    m.shear_modulus_base = 1.0 / 2.6;
    m.poisson_base = 0.3;
    m.thermal_conductivity_base = 1.0;
    m.electrical_conductivity_base = 1.0;
    m.yield_stress_0 = 1.0;
    m.reference_strain_eps0 = 1e-3;
    m.hardening_exponent_n = 0.1;
    return m;
  }

  void save(const std::filesystem::path& path) const {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["reference_material"] = {
        {"young_modulus_base", reference_material.young_modulus_base},
        {"poisson_base", reference_material.poisson_base},
        {"thermal_conductivity_base", reference_material.thermal_conductivity_base},
        {"electrical_conductivity_base", reference_material.electrical_conductivity_base},
    };
    j["solver_tol"] = solver_tol;
    auto& arr = j["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
      nlohmann::ordered_json je;
      je["x"] = e.x.coords;
      nlohmann::ordered_json props;
      for (Property p : {Property::E, Property::G, Property::nu, Property::kappa,
                         Property::sigma, Property::vf})
        if (e.properties.has(p)) props[to_string(p)] = e.properties.get(p);
      je["properties"] = props;
      je["feasible"] = e.properties.feasible;
      je["resolution"] = e.resolution;
      je["generator"] = e.generator_version;
      arr.push_back(je);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write seed library: " + path.string());
    out << j.dump(1) << "\n";
  }

  static SeedLibrary load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open seed library: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    SeedLibrary lib;
    lib.reference_material = default_reference_material();
    if (j.contains("reference_material")) {
      const auto& m = j["reference_material"];
      lib.reference_material.young_modulus_base =
          m.value("young_modulus_base", 1.0);
      lib.reference_material.poisson_base = m.value("poisson_base", 0.3);
      lib.reference_material.thermal_conductivity_base =
          m.value("thermal_conductivity_base", 1.0);
      lib.reference_material.electrical_conductivity_base =
          m.value("electrical_conductivity_base", 1.0);
    }
    lib.solver_tol = j.value("solver_tol", 0.0);
    for (const auto& je : j.at("entries")) {
      SeedEntry e;
      e.x = ConditioningVector(je.at("x").get<std::vector<double>>());
      for (const auto& [key, value] : je.at("properties").items())
        e.properties.set(parse_property(key), value.get<double>());
      e.properties.feasible = je.value("feasible", true);
      e.resolution = je.value("resolution", 0);
      e.generator_version = je.value("generator", std::string());
      lib.entries.push_back(std::move(e));
    }
    return lib;
  }
};

namespace detail {

// Library properties are stored at unit base moduli; rescale them to the
// task's base material before comparing against targets.
inline double scaled_entry_property(const SeedEntry& entry, Property p,
                                    const TaskSpec& spec) {
  const double raw = entry.properties.get(p);
  switch (p) {
    case Property::E:
    case Property::G: return raw * spec.material.young_modulus_base;
    case Property::kappa: return raw * spec.material.thermal_conductivity_base;
    case Property::sigma: return raw * spec.material.electrical_conductivity_base;
    default: return raw;  // nu, vf are dimensionless
  }
}

}  // namespace detail

// The k library entries closest to the task's match targets, scored by the
// sum of squared normalized deviations; ties resolve in library index order.
// Threshold objectives and properties outside the library (Wp) do not enter
// the score.
inline std::vector<ConditioningVector> retrieve_seeds(const TaskSpec& spec,
                                                      const SeedLibrary& library,
                                                      std::size_t k) {
  if (k == 0 || library.entries.empty()) return {};

  std::vector<double> score(library.entries.size(), 0.0);
  for (std::size_t i = 0; i < library.entries.size(); ++i) {
    const auto& entry = library.entries[i];
    for (const auto& o : spec.objectives) {
      if (o.kind != ObjectiveKind::match_target) continue;
      if (!entry.properties.has(o.property)) continue;
      const double value = detail::scaled_entry_property(entry, o.property, spec);
      const double dev = (value - o.target) / o.target;
      score[i] += dev * dev;
    }
  }

  std::vector<std::size_t> order(library.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return score[a] < score[b];
  });

  std::vector<ConditioningVector> seeds;
  const std::size_t count = std::min(k, order.size());
  seeds.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    seeds.push_back(library.entries[order[i]].x);
  return seeds;
}

// Regenerates the shipped library: a lattice^3 grid of conditioning points at
// cell centers, evaluated with the full simulator suite on the reference
// material.
inline SeedLibrary build_seed_library(int lattice, int resolution,
                                      const fea::SolverConfig& solver) {
  SeedLibrary lib;
  lib.reference_material = SeedLibrary::default_reference_material();
  lib.solver_tol = solver.residual_tol;

  TaskSpec probe;
  probe.task_id = "seed-library-probe";
  probe.material = lib.reference_material;
  for (Property p : {Property::E, Property::G, Property::nu, Property::kappa,
                     Property::sigma, Property::vf})
    probe.objectives.push_back({p, ObjectiveKind::match_target, 1.0, 0.10});

  for (int i = 0; i < lattice; ++i) {
    for (int jj = 0; jj < lattice; ++jj) {
      for (int kk = 0; kk < lattice; ++kk) {
        SeedEntry entry;
        entry.x = ConditioningVector((i + 0.5) / lattice, (jj + 0.5) / lattice,
                                     (kk + 0.5) / lattice);
        entry.resolution = resolution;
        entry.generator_version = kGeneratorVersion;
        const VoxelGrid grid = generate(entry.x, resolution);
        entry.properties = fea::evaluate_properties(grid, probe, solver);
        lib.entries.push_back(std::move(entry));
      }
    }
  }
  return lib;
}

}  // namespace voxmat

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxmat/material.hpp"
#include "voxmat/objective.hpp"
#include "voxmat/property.hpp"

namespace voxmat {

enum class Difficulty { easy, medium, hard };

inline const char* to_string(Difficulty d) {
  switch (d) {
    case Difficulty::easy: return "easy";
    case Difficulty::medium: return "medium";
    case Difficulty::hard: return "hard";
  }
  return "?";
}

struct RunBudget {
  int max_generations = 10;
  int max_evaluations = 220;  // initial population + 10 generations of 20
};

struct TaskSpec {
  std::string task_id;
  std::vector<ObjectiveSpec> objectives;
  MaterialParams material;
  Difficulty difficulty = Difficulty::medium;
  RunBudget budget;
  std::uint64_t seed = 0;

  std::size_t objective_count() const { return objectives.size(); }

  const ObjectiveSpec* find_objective(Property p) const {
    for (const auto& o : objectives)
      if (o.property == p) return &o;
    return nullptr;
  }
};

struct TaskParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& key,
                             const std::string& ctx) {
  if (!j.contains(key))
    throw TaskParseError(ctx + ": missing field '" + key + "'");
  if (!j[key].is_number())
    throw TaskParseError(ctx + "." + key + ": expected a number");
  return j[key].get<double>();
}

inline std::string require_string(const nlohmann::json& j,
                                  const std::string& key,
                                  const std::string& ctx) {
  if (!j.contains(key))
    throw TaskParseError(ctx + ": missing field '" + key + "'");
  if (!j[key].is_string())
    throw TaskParseError(ctx + "." + key + ": expected a string");
  return j[key].get<std::string>();
}

}  // namespace detail

inline TaskSpec parse_task(const nlohmann::json& j) {
  TaskSpec spec;
  spec.task_id = detail::require_string(j, "task_id", "task");

  const std::string diff = j.value("difficulty", std::string("medium"));
  if (diff == "easy") spec.difficulty = Difficulty::easy;
  else if (diff == "medium") spec.difficulty = Difficulty::medium;
  else if (diff == "hard") spec.difficulty = Difficulty::hard;
  else throw TaskParseError("task.difficulty: unknown value '" + diff + "'");

  spec.seed = j.value("seed", std::uint64_t{0});

  if (j.contains("budget")) {
    const auto& b = j["budget"];
    spec.budget.max_generations =
        static_cast<int>(b.value("max_generations", 10));
    spec.budget.max_evaluations =
        static_cast<int>(b.value("max_evaluations", 220));
    if (spec.budget.max_generations < 0)
      throw TaskParseError("task.budget.max_generations: must be >= 0");
    if (spec.budget.max_evaluations < 1)
      throw TaskParseError("task.budget.max_evaluations: must be >= 1");
  }

  if (!j.contains("material"))
    throw TaskParseError("task: missing field 'material'");
  const auto& m = j["material"];
  spec.material.name = m.value("name", std::string("unnamed"));
  spec.material.young_modulus_base =
      detail::require_number(m, "young_modulus_base", "material");
  spec.material.shear_modulus_base =
      detail::require_number(m, "shear_modulus_base", "material");
  spec.material.poisson_base =
      detail::require_number(m, "poisson_base", "material");
  spec.material.thermal_conductivity_base =
      detail::require_number(m, "thermal_conductivity_base", "material");
  spec.material.electrical_conductivity_base =
      detail::require_number(m, "electrical_conductivity_base", "material");
  spec.material.yield_stress_0 = m.value("yield_stress_0", 0.0);
  spec.material.reference_strain_eps0 = m.value("reference_strain_eps0", 1e-3);
  spec.material.hardening_exponent_n = m.value("hardening_exponent_n", 0.0);
  try {
    spec.material.validate();
  } catch (const std::invalid_argument& e) {
    throw TaskParseError(e.what());
  }

  if (!j.contains("objectives") || !j["objectives"].is_array())
    throw TaskParseError("task: missing field 'objectives' (array)");
  const auto& objs = j["objectives"];
  if (objs.empty())
    throw TaskParseError("task.objectives: must contain at least one entry");

  std::set<Property> seen;
  int idx = 0;
  for (const auto& o : objs) {
    const std::string ctx = "objectives[" + std::to_string(idx) + "]";
    ObjectiveSpec spec_obj;
    try {
      spec_obj.property = parse_property(detail::require_string(o, "property", ctx));
    } catch (const std::invalid_argument& e) {
      throw TaskParseError(ctx + ".property: " + e.what());
    }
    const std::string kind = detail::require_string(o, "kind", ctx);
    if (kind == "match_target") spec_obj.kind = ObjectiveKind::match_target;
    else if (kind == "maximize") spec_obj.kind = ObjectiveKind::maximize;
    else if (kind == "minimize") spec_obj.kind = ObjectiveKind::minimize;
    else throw TaskParseError(ctx + ".kind: unknown value '" + kind + "'");

    spec_obj.target = detail::require_number(o, "target", ctx);
    if (spec_obj.target == 0.0)
      throw TaskParseError(ctx + ".target: zero targets are not supported "
                           "(relative error is undefined)");
    spec_obj.tolerance = o.value("tolerance", 0.10);
    if (!(spec_obj.tolerance > 0.0 && spec_obj.tolerance < 1.0))
      throw TaskParseError(ctx + ".tolerance: must lie in (0, 1)");

    if (!seen.insert(spec_obj.property).second)
      throw TaskParseError(ctx + ": duplicate objective for property '" +
                           std::string(to_string(spec_obj.property)) + "'");

    // Poisson targets at or above 0.45 fall outside the validated stiffness
    // regime of the generator family and are rejected up front.
    if (spec_obj.property == Property::nu &&
        spec_obj.kind == ObjectiveKind::match_target &&
        spec_obj.target >= 0.45)
      throw TaskParseError(ctx + ".target: nu targets >= 0.45 are rejected");

    spec.objectives.push_back(spec_obj);
    ++idx;
  }
  return spec;
}

inline TaskSpec load_task(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw TaskParseError("cannot open task file: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw TaskParseError("parse error in " + path.string() + ": " + e.what());
  }
  try {
    return parse_task(j);
  } catch (const TaskParseError& e) {
    throw TaskParseError(path.string() + ": " + e.what());
  }
}

// Outcome of the stiffness feasibility screen. Clamping is applied in place
// and reported; an E = 2G(1+nu) inconsistency is only flagged.
struct FeasibilityReport {
  bool has_e_target = false;
  bool clamped = false;
  double original_e_target = 0.0;
  double adjusted_e_target = 0.0;
  bool consistency_checked = false;
  bool consistent = true;
  std::vector<std::string> notes;
};

inline FeasibilityReport check_stiffness_feasibility(TaskSpec& spec) {
  constexpr double kLoRatio = 0.05;
  constexpr double kHiRatio = 0.40;
  constexpr double kConsistencyTol = 0.10;

  FeasibilityReport report;
  ObjectiveSpec* e_obj = nullptr;
  for (auto& o : spec.objectives)
    if (o.property == Property::E && o.kind == ObjectiveKind::match_target)
      e_obj = &o;
  if (!e_obj) {
    report.notes.push_back("no E match target; stiffness screen skipped");
    return report;
  }

  report.has_e_target = true;
  report.original_e_target = e_obj->target;
  const double lo = kLoRatio * spec.material.young_modulus_base;
  const double hi = kHiRatio * spec.material.young_modulus_base;
  double adjusted = e_obj->target;
  if (adjusted < lo) adjusted = lo;
  if (adjusted > hi) adjusted = hi;
  if (adjusted != e_obj->target) {
    report.clamped = true;
    std::ostringstream msg;
    msg << "E target " << e_obj->target << " outside [" << lo << ", " << hi
        << "] = [0.05, 0.40] * E_base; clamped to " << adjusted;
    report.notes.push_back(msg.str());
    e_obj->target = adjusted;
  }
  report.adjusted_e_target = e_obj->target;

  const ObjectiveSpec* g_obj = spec.find_objective(Property::G);
  const ObjectiveSpec* nu_obj = spec.find_objective(Property::nu);
  if (g_obj && g_obj->kind == ObjectiveKind::match_target && nu_obj &&
      nu_obj->kind == ObjectiveKind::match_target) {
    report.consistency_checked = true;
    const double implied = 2.0 * g_obj->target * (1.0 + nu_obj->target);
    report.consistent =
        std::abs(e_obj->target - implied) <= kConsistencyTol * e_obj->target;
    if (!report.consistent) {
      std::ostringstream msg;
      msg << "targets violate E = 2G(1+nu): E = " << e_obj->target
          << " vs 2G(1+nu) = " << implied;
      report.notes.push_back(msg.str());
    }
  }
  return report;
}

// True iff every objective is met: match targets within their tolerance band
// (boundary inclusive), thresholds reached for maximize/minimize.
inline bool is_fully_valid(const PropertyVector& props, const TaskSpec& spec) {
  for (const auto& o : spec.objectives) {
    if (!satisfied(o, props.get(o.property))) return false;
  }
  return true;
}

}  // namespace voxmat

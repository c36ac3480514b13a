#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "voxmat/rng.hpp"
#include "voxmat/task.hpp"

using namespace voxmat;

namespace {

nlohmann::json base_material_json() {
  return {
      {"name", "copper"},
      {"young_modulus_base", 110000.0},
      {"shear_modulus_base", 41000.0},
      {"poisson_base", 0.34},
      {"thermal_conductivity_base", 400.0},
      {"electrical_conductivity_base", 5.96e7},
      {"yield_stress_0", 70.0},
      {"reference_strain_eps0", 0.001},
      {"hardening_exponent_n", 0.1},
  };
}

nlohmann::json cross_physics_task_json() {
  return {
      {"task_id", "task02_cross_physics_precise"},
      {"difficulty", "hard"},
      {"seed", 7},
      {"material", base_material_json()},
      {"objectives",
       {
           {{"property", "sigma"}, {"kind", "match_target"}, {"target", 3.8e6}},
           {{"property", "kappa"}, {"kind", "match_target"}, {"target", 26.0}},
           {{"property", "E"}, {"kind", "match_target"}, {"target", 3000.0}},
           {{"property", "nu"}, {"kind", "match_target"}, {"target", 0.25}},
           {{"property", "vf"}, {"kind", "match_target"}, {"target", 0.25}},
       }},
  };
}

TaskSpec write_and_load(const nlohmann::json& j) {
  const auto path = std::filesystem::temp_directory_path() / "voxmat_task_test.json";
  std::ofstream(path) << j.dump(2);
  return load_task(path);
}

}  // namespace

TEST_CASE("load_task parses a five-objective cross-physics task") {
  const TaskSpec spec = write_and_load(cross_physics_task_json());
  REQUIRE(spec.task_id == "task02_cross_physics_precise");
  REQUIRE(spec.objective_count() == 5);
  REQUIRE(spec.difficulty == Difficulty::hard);
  REQUIRE(spec.seed == 7);
  CHECK(spec.budget.max_generations == 10);
  CHECK(spec.budget.max_evaluations == 220);
  const ObjectiveSpec* sigma = spec.find_objective(Property::sigma);
  REQUIRE(sigma != nullptr);
  CHECK(sigma->target == 3.8e6);
  CHECK(sigma->tolerance == 0.10);
  CHECK(spec.material.electrical_conductivity_base == 5.96e7);
}

TEST_CASE("load_task rejects an empty objectives list") {
  auto j = cross_physics_task_json();
  j["objectives"] = nlohmann::json::array();
  CHECK_THROWS_AS(write_and_load(j), TaskParseError);
}

TEST_CASE("load_task parses a threshold-style task") {
  nlohmann::json j = {
      {"task_id", "task17_high_stiffness"},
      {"difficulty", "easy"},
      {"material", base_material_json()},
      {"objectives",
       {
           {{"property", "E"}, {"kind", "maximize"}, {"target", 5000.0}},
           {{"property", "vf"}, {"kind", "minimize"}, {"target", 0.25}},
       }},
  };
  const TaskSpec spec = write_and_load(j);
  REQUIRE(spec.objective_count() == 2);
  CHECK(spec.objectives[0].kind == ObjectiveKind::maximize);
  CHECK(spec.objectives[1].kind == ObjectiveKind::minimize);
}

TEST_CASE("load_task rejects schema violations by field") {
  auto dup = cross_physics_task_json();
  dup["objectives"].push_back(
      {{"property", "E"}, {"kind", "maximize"}, {"target", 1.0}});
  CHECK_THROWS_WITH(write_and_load(dup),
                    Catch::Matchers::ContainsSubstring("duplicate"));

  auto zero = cross_physics_task_json();
  zero["objectives"][0]["target"] = 0.0;
  CHECK_THROWS_WITH(write_and_load(zero),
                    Catch::Matchers::ContainsSubstring("target"));

  auto tol = cross_physics_task_json();
  tol["objectives"][0]["tolerance"] = 1.5;
  CHECK_THROWS_WITH(write_and_load(tol),
                    Catch::Matchers::ContainsSubstring("tolerance"));

  auto high_nu = cross_physics_task_json();
  high_nu["objectives"][3]["target"] = 0.47;
  CHECK_THROWS_WITH(write_and_load(high_nu),
                    Catch::Matchers::ContainsSubstring("0.45"));

  auto bad_material = cross_physics_task_json();
  bad_material["material"]["poisson_base"] = 0.6;
  CHECK_THROWS_WITH(write_and_load(bad_material),
                    Catch::Matchers::ContainsSubstring("poisson_base"));
}

TEST_CASE("stiffness feasibility keeps in-range targets") {
  TaskSpec spec;
  spec.material.young_modulus_base = 1100.0;
  spec.material.shear_modulus_base = 420.0;
  spec.material.poisson_base = 0.3;
  spec.objectives.push_back(
      {Property::E, ObjectiveKind::match_target, 110.0, 0.10});
  const auto report = check_stiffness_feasibility(spec);
  CHECK(report.has_e_target);
  CHECK_FALSE(report.clamped);
  CHECK(spec.objectives[0].target == 110.0);
}

TEST_CASE("stiffness feasibility clamps to 0.40 E_base") {
  TaskSpec spec;
  spec.material.young_modulus_base = 1000.0;
  spec.objectives.push_back(
      {Property::E, ObjectiveKind::match_target, 500.0, 0.10});
  const auto report = check_stiffness_feasibility(spec);
  CHECK(report.clamped);
  CHECK(spec.objectives[0].target == Catch::Approx(400.0));

  // Clamping is idempotent.
  TaskSpec again = spec;
  const auto second = check_stiffness_feasibility(again);
  CHECK_FALSE(second.clamped);
  CHECK(again.objectives[0].target == spec.objectives[0].target);
}

TEST_CASE("stiffness consistency check E = 2G(1+nu)") {
  TaskSpec spec;
  spec.material.young_modulus_base = 30000.0;  // E target at 0.1 E_base
  spec.objectives.push_back(
      {Property::E, ObjectiveKind::match_target, 3000.0, 0.10});
  spec.objectives.push_back(
      {Property::G, ObjectiveKind::match_target, 1200.0, 0.10});
  spec.objectives.push_back(
      {Property::nu, ObjectiveKind::match_target, 0.25, 0.10});
  const auto report = check_stiffness_feasibility(spec);
  REQUIRE(report.consistency_checked);
  CHECK(report.consistent);  // 2 * 1200 * 1.25 == 3000

  TaskSpec bad = spec;
  bad.objectives[1].target = 2000.0;
  const auto flagged = check_stiffness_feasibility(bad);
  REQUIRE(flagged.consistency_checked);
  CHECK_FALSE(flagged.consistent);
  CHECK(bad.objectives[1].target == 2000.0);  // reported, not auto-fixed
}

TEST_CASE("signed_error matches the published deviations") {
  CHECK(signed_error(0.0340, 0.035) == Catch::Approx(-2.857142857).epsilon(1e-9));
  CHECK(signed_error(3.78e6, 3.8e6) == Catch::Approx(-0.526315789).epsilon(1e-9));
  CHECK(signed_error(5.0, 5.0) == 0.0);
  CHECK_THROWS_AS(signed_error(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("signed_error is antisymmetric in the deviation") {
  const double target = 7.3;
  for (double d : {0.01, 0.5, 2.0}) {
    CHECK(signed_error(target + d, target) ==
          Catch::Approx(-signed_error(target - d, target)).margin(1e-12));
  }
}

TEST_CASE("is_fully_valid checks every objective with inclusive bounds") {
  TaskSpec spec;
  spec.objectives.push_back(
      {Property::E, ObjectiveKind::match_target, 100.0, 0.10});
  spec.objectives.push_back(
      {Property::vf, ObjectiveKind::minimize, 0.5, 0.10});

  PropertyVector props;
  props.set(Property::E, 100.0);
  props.set(Property::vf, 0.5);
  CHECK(is_fully_valid(props, spec));

  props.set(Property::E, 110.0);  // exactly delta * T away
  CHECK(is_fully_valid(props, spec));

  props.set(Property::E, 110.5);  // 10.5% deviation
  CHECK_FALSE(is_fully_valid(props, spec));

  props.set(Property::E, 100.0);
  props.set(Property::vf, 0.51);
  CHECK_FALSE(is_fully_valid(props, spec));

  PropertyVector missing;
  missing.set(Property::E, 100.0);
  CHECK_THROWS_AS(is_fully_valid(missing, spec), MissingPropertyError);
}

TEST_CASE("is_fully_valid is monotone in shrinking deviations") {
  TaskSpec spec;
  spec.objectives.push_back(
      {Property::E, ObjectiveKind::match_target, 50.0, 0.10});
  spec.objectives.push_back(
      {Property::kappa, ObjectiveKind::match_target, 2.0, 0.10});
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    PropertyVector far, near;
    const double de = rng.uniform(-0.3, 0.3);
    const double dk = rng.uniform(-0.3, 0.3);
    const double shrink = rng.uniform01();
    far.set(Property::E, 50.0 * (1.0 + de));
    far.set(Property::kappa, 2.0 * (1.0 + dk));
    near.set(Property::E, 50.0 * (1.0 + de * shrink));
    near.set(Property::kappa, 2.0 * (1.0 + dk * shrink));
    if (is_fully_valid(far, spec)) CHECK(is_fully_valid(near, spec));
  }
}

TEST_CASE("threshold objectives report shortfall-only errors") {
  ObjectiveSpec max_e{Property::E, ObjectiveKind::maximize, 5000.0, 0.10};
  CHECK(signed_relative_error(max_e, 6000.0) == 0.0);
  CHECK(signed_relative_error(max_e, 4000.0) == Catch::Approx(0.2));
  ObjectiveSpec min_vf{Property::vf, ObjectiveKind::minimize, 0.25, 0.10};
  CHECK(signed_relative_error(min_vf, 0.2) == 0.0);
  CHECK(signed_relative_error(min_vf, 0.30) == Catch::Approx(0.2));
}

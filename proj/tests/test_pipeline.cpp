#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "voxmat/bench.hpp"
#include "voxmat/pipeline.hpp"
#include "voxmat/runresult_io.hpp"
#include "voxmat/seed_library.hpp"

using namespace voxmat;

namespace {

TaskSpec tiny_task() {
  TaskSpec spec;
  spec.task_id = "tiny";
  spec.material.name = "unit";
  spec.material.young_modulus_base = 1000.0;
  spec.material.shear_modulus_base = 400.0;
  spec.material.poisson_base = 0.3;
  spec.material.thermal_conductivity_base = 10.0;
  spec.material.electrical_conductivity_base = 1e6;
  spec.objectives.push_back(
      {Property::kappa, ObjectiveKind::match_target, 2.0, 0.10});
  spec.objectives.push_back(
      {Property::vf, ObjectiveKind::match_target, 0.35, 0.10});
  spec.budget.max_generations = 3;
  spec.budget.max_evaluations = 30;
  return spec;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("pipeline transitions follow the priority rules") {
  PipelinePhase st;
  CHECK(st.phase == Phase::parse);
  st = step_pipeline(st, {Phase::parse, PhaseStatus::ok, true});
  CHECK(st.phase == Phase::generate);
  st = step_pipeline(st, {Phase::generate, PhaseStatus::ok, true});
  CHECK(st.phase == Phase::simulate);

  SECTION("satisfied simulation routes to report") {
    st = resolve_simulation(st, PhaseStatus::satisfied, true);
    CHECK(st.phase == Phase::report);
    CHECK(st.last_status == PhaseStatus::satisfied);
    CHECK(st.iterations == 0);
    st = step_pipeline(st, {Phase::report, PhaseStatus::ok, false});
    CHECK(st.phase == Phase::terminated);
  }

  SECTION("iterate with budget routes back to generate and counts") {
    st = resolve_simulation(st, PhaseStatus::iterate, true);
    CHECK(st.phase == Phase::generate);
    CHECK(st.iterations == 1);
    CHECK(st.generation == 1);
  }

  SECTION("iterate without budget routes to report as exhausted") {
    st = resolve_simulation(st, PhaseStatus::iterate, false);
    CHECK(st.phase == Phase::report);
    CHECK(st.last_status == PhaseStatus::budget_exhausted);
  }
}

TEST_CASE("illegal pipeline transitions fault with both states named") {
  PipelinePhase st;  // parse
  CHECK_THROWS_AS(step_pipeline(st, {Phase::simulate, PhaseStatus::ok, true}),
                  PipelineError);
  try {
    step_pipeline(st, {Phase::report, PhaseStatus::ok, true});
    FAIL("expected a PipelineError");
  } catch (const PipelineError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("parse") != std::string::npos);
    CHECK(msg.find("report") != std::string::npos);
  }

  PipelinePhase done;
  done.phase = Phase::terminated;
  CHECK_THROWS_AS(step_pipeline(done, {Phase::terminated, PhaseStatus::ok, true}),
                  PipelineError);
}

TEST_CASE("pipeline never revisits parse and ends terminated") {
  PipelinePhase st;
  st = step_pipeline(st, {Phase::parse, PhaseStatus::ok, true});
  for (int i = 0; i < 4; ++i) {
    st = step_pipeline(st, {Phase::generate, PhaseStatus::ok, true});
    CHECK(st.phase == Phase::simulate);
    st = resolve_simulation(st, PhaseStatus::iterate, i < 3);
    CHECK(st.phase != Phase::parse);
  }
  CHECK(st.phase == Phase::report);
  CHECK(st.iterations == 3);
  st = step_pipeline(st, {Phase::report, PhaseStatus::ok, false});
  CHECK(st.phase == Phase::terminated);
}

TEST_CASE("run report ends with the terminal token") {
  const TaskSpec spec = tiny_task();
  RunOptions opt;
  opt.saes.population = 6;
  const Evaluator eval = make_physics_evaluator(spec, 8, fea::SolverConfig{});
  const RunResult run = run_method(spec, Method::saes, opt, eval, 1);
  const std::string text = run_report_text(run, spec, opt.saes);
  CHECK(text.rfind("TERMINATE\n") == text.size() - 10);
  CHECK(text.find("iterations:") != std::string::npos);
}

TEST_CASE("run result files round trip through the summary reader") {
  const TaskSpec spec = tiny_task();
  RunOptions opt;
  opt.saes.population = 6;
  const Evaluator eval = make_physics_evaluator(spec, 8, fea::SolverConfig{});
  const RunResult run = run_method(spec, Method::random_search, opt, eval, 5);

  const auto path = std::filesystem::temp_directory_path() / "voxmat_run_test.jsonl";
  std::ofstream(path) << runresult_to_jsonl(run);
  const metrics::RunSummary summary = runsummary_from_jsonl(path);
  CHECK(summary.task_id == run.task_id);
  CHECK(summary.method == "random");
  CHECK(summary.seed == run.seed);
  CHECK(summary.success == run.success);
  CHECK(summary.evaluations == run.evaluations);
  CHECK(summary.candidates.size() == run.history.size());
}

TEST_CASE("identical sweeps produce byte-identical run files") {
  const TaskSpec spec = tiny_task();
  BenchConfig cfg;
  cfg.resolution = 8;
  cfg.saes.population = 6;
  cfg.workers = 2;
  const auto base = std::filesystem::temp_directory_path() / "voxmat_sweep";
  std::filesystem::remove_all(base / "a");
  std::filesystem::remove_all(base / "b");

  cfg.out_dir = base / "a";
  run_benchmark({spec}, {Method::saes, Method::random_search}, {1, 2}, cfg);
  cfg.out_dir = base / "b";
  run_benchmark({spec}, {Method::saes, Method::random_search}, {1, 2}, cfg);

  for (const char* name : {"saes_1.jsonl", "saes_2.jsonl", "random_1.jsonl",
                           "random_2.jsonl"}) {
    const std::string a = slurp(base / "a" / "tiny" / name);
    const std::string b = slurp(base / "b" / "tiny" / name);
    REQUIRE(!a.empty());
    CHECK(a == b);
  }
  CHECK(slurp(base / "a" / "series.csv") == slurp(base / "b" / "series.csv"));
}

TEST_CASE("seed retrieval ranks by squared normalized deviation") {
  SeedLibrary lib;
  lib.reference_material = SeedLibrary::default_reference_material();
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    SeedEntry e;
    e.x = ConditioningVector(i / 10.0, 0.5, 0.5);
    e.properties.set(Property::E, rng.uniform(0.01, 0.5));
    e.properties.set(Property::vf, rng.uniform(0.1, 0.9));
    e.resolution = 16;
    e.generator_version = kGeneratorVersion;
    lib.entries.push_back(e);
  }

  TaskSpec spec = tiny_task();
  spec.objectives.clear();
  spec.material.young_modulus_base = 1.0;
  spec.objectives.push_back({Property::E, ObjectiveKind::match_target, 0.2, 0.10});

  const auto seeds = retrieve_seeds(spec, lib, 3);
  REQUIRE(seeds.size() == 3);

  // Exhaustive oracle sort on |E_i - T|.
  std::vector<std::size_t> order(lib.entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(lib.entries[a].properties.get(Property::E) - 0.2) <
           std::abs(lib.entries[b].properties.get(Property::E) - 0.2);
  });
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(seeds[i].coords == lib.entries[order[i]].x.coords);

  CHECK(retrieve_seeds(spec, lib, 0).empty());
  SeedLibrary single;
  single.entries.push_back(lib.entries[0]);
  CHECK(retrieve_seeds(spec, single, 3).size() == 1);
  CHECK(retrieve_seeds(spec, SeedLibrary{}, 3).empty());
}

TEST_CASE("seed library files round trip") {
  SeedLibrary lib;
  lib.reference_material = SeedLibrary::default_reference_material();
  lib.solver_tol = 1e-6;
  SeedEntry e;
  e.x = ConditioningVector(0.1, 0.3, 0.9);
  e.properties.set(Property::E, 0.123);
  e.properties.set(Property::vf, 0.4);
  e.properties.feasible = true;
  e.resolution = 16;
  e.generator_version = kGeneratorVersion;
  lib.entries.push_back(e);

  const auto path = std::filesystem::temp_directory_path() / "voxmat_lib_test.json";
  lib.save(path);
  const SeedLibrary loaded = SeedLibrary::load(path);
  REQUIRE(loaded.entries.size() == 1);
  CHECK(loaded.entries[0].x.coords == e.x.coords);
  CHECK(loaded.entries[0].properties.get(Property::E) == 0.123);
  CHECK(loaded.entries[0].resolution == 16);
  CHECK(loaded.solver_tol == 1e-6);
}

TEST_CASE("evaluation cache returns identical results") {
  const TaskSpec spec = tiny_task();
  auto cache = std::make_shared<EvalCache>();
  const Evaluator cached = make_physics_evaluator(spec, 8, fea::SolverConfig{}, cache);
  const Evaluator fresh = make_physics_evaluator(spec, 8, fea::SolverConfig{});

  const ConditioningVector x(0.45, 0.5, 0.5);
  const Evaluation a = cached(x);
  const Evaluation b = cached(x);  // cache hit
  const Evaluation c = fresh(x);
  CHECK(cache->size() == 1);
  CHECK(a.properties.get(Property::kappa) == b.properties.get(Property::kappa));
  CHECK(a.properties.get(Property::kappa) == c.properties.get(Property::kappa));
  CHECK(a.properties.get(Property::vf) == c.properties.get(Property::vf));
}

TEST_CASE("evaluator reports failures per candidate") {
  TaskSpec spec = tiny_task();
  fea::SolverConfig broken;
  broken.max_iterations = 1;  // cannot converge on a mixed grid
  broken.residual_tol = 1e-14;
  const Evaluator eval = make_physics_evaluator(spec, 8, broken);
  const Evaluation result = eval(ConditioningVector(0.45, 0.5, 0.5));
  CHECK(result.failed);
  CHECK(!result.failure_reason.empty());

  // The run keeps going and records the failure.
  RunOptions opt;
  opt.saes.population = 4;
  TaskSpec budgeted = spec;
  budgeted.budget.max_generations = 1;
  budgeted.budget.max_evaluations = 8;
  const RunResult run = run_method(budgeted, Method::saes, opt, eval, 3);
  CHECK(run.evaluations == 8);
  for (const auto& rec : run.history) CHECK(rec.eval_failed);
  CHECK_FALSE(run.success);
}

#pragma once

#include <chrono>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "voxmat/baselines.hpp"
#include "voxmat/evaluator.hpp"
#include "voxmat/saes.hpp"
#include "voxmat/seed_library.hpp"
#include "voxmat/task.hpp"

namespace voxmat {

// ---------------------------------------------------------------------------
// Deterministic pipeline state machine.

enum class Phase { parse, generate, simulate, decide, report, terminated };

enum class PhaseStatus { ok, satisfied, iterate, budget_exhausted, error };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::parse: return "parse";
    case Phase::generate: return "generate";
    case Phase::simulate: return "simulate";
    case Phase::decide: return "decide";
    case Phase::report: return "report";
    case Phase::terminated: return "terminated";
  }
  return "?";
}

inline const char* to_string(PhaseStatus s) {
  switch (s) {
    case PhaseStatus::ok: return "ok";
    case PhaseStatus::satisfied: return "satisfied";
    case PhaseStatus::iterate: return "iterate";
    case PhaseStatus::budget_exhausted: return "budget_exhausted";
    case PhaseStatus::error: return "error";
  }
  return "?";
}

struct PipelinePhase {
  Phase phase = Phase::parse;
  int generation = 0;
  PhaseStatus last_status = PhaseStatus::ok;
  int iterations = 0;  // decide -> generate transitions
};

struct PhaseEvent {
  Phase completed = Phase::parse;
  PhaseStatus status = PhaseStatus::ok;
  bool budget_remaining = true;
};

struct PipelineError : std::logic_error {
  PipelineError(const PipelinePhase& state, const PhaseEvent& event)
      : std::logic_error(std::string("illegal pipeline transition: phase '") +
                         to_string(state.phase) + "' cannot consume '" +
                         to_string(event.completed) + "' completion") {}
};

// Priority-rule transition table. The decide phase routes back to the
// generator only while the run is unsatisfied and budget remains; exhaustion
// routes to the reporter.
inline PipelinePhase step_pipeline(PipelinePhase state, const PhaseEvent& event) {
  if (event.completed != state.phase) throw PipelineError(state, event);
  switch (state.phase) {
    case Phase::parse:
      state.phase = Phase::generate;
      return state;
    case Phase::generate:
      state.phase = Phase::simulate;
      return state;
    case Phase::simulate:
      state.phase = Phase::decide;
      state.last_status = event.status;
      return state;
    case Phase::decide:
      if (event.status == PhaseStatus::satisfied) {
        state.phase = Phase::report;
        state.last_status = PhaseStatus::satisfied;
      } else if (event.budget_remaining) {
        state.phase = Phase::generate;
        state.last_status = PhaseStatus::iterate;
        state.iterations += 1;
        state.generation += 1;
      } else {
        state.phase = Phase::report;
        state.last_status = PhaseStatus::budget_exhausted;
      }
      return state;
    case Phase::report:
      state.phase = Phase::terminated;
      return state;
    case Phase::terminated:
      throw PipelineError(state, event);
  }
  throw PipelineError(state, event);
}

// Convenience wrapper: a simulation completion immediately resolves the
// decide phase, since the decision needs no further input.
inline PipelinePhase resolve_simulation(PipelinePhase state, PhaseStatus status,
                                        bool budget_remaining) {
  state = step_pipeline(state, {Phase::simulate, status, budget_remaining});
  return step_pipeline(state, {Phase::decide, status, budget_remaining});
}

// ---------------------------------------------------------------------------
// Method steppers.

class Stepper {
 public:
  virtual ~Stepper() = default;
  virtual const char* name() const = 0;
  virtual std::vector<ConditioningVector> propose(
      int generation, const std::vector<EvalRecord>& history, Rng& rng) = 0;
  virtual void integrate(const std::vector<EvalRecord>& history,
                         std::size_t fresh_begin, int generation, Rng& rng) = 0;
  virtual std::vector<double> weights() const { return {}; }
  virtual double eta() const { return 0.0; }
};

namespace detail {

inline ConditioningVector random_point(Rng& rng) {
  return ConditioningVector(rng.uniform01(), rng.uniform01(), rng.uniform01());
}

inline std::vector<EvalRecord> survivors(const std::vector<EvalRecord>& merged,
                                         const TaskSpec& spec, std::size_t n) {
  std::vector<pareto::ObjectivePoint> points;
  points.reserve(merged.size());
  for (std::size_t i = 0; i < merged.size(); ++i)
    points.push_back(to_objective_point(merged[i], spec, static_cast<int>(i)));
  std::vector<EvalRecord> next;
  next.reserve(n);
  for (int id : pareto::select(points, std::min(n, merged.size())))
    next.push_back(merged[static_cast<std::size_t>(id)]);
  return next;
}

}  // namespace detail

// The simulation-aware search: perception (WLS gradient on the scalar
// utility), action (signed normalized step with momentum and noise) and
// integration (Pareto survivor selection, elite archive handled by the
// runner, adaptive weights, adaptive step size).
class SaesStepper : public Stepper {
 public:
  SaesStepper(const TaskSpec& spec, const SaesConfig& cfg,
              const SeedLibrary* library)
      : spec_(spec),
        cfg_(cfg),
        library_(library),
        weights_(spec.objectives.size(), 1.0),
        momentum_(Eigen::VectorXd::Zero(kConditioningDim)),
        eta_(cfg.base_step) {}

  const char* name() const override { return "saes"; }
  std::vector<double> weights() const override { return weights_; }
  double eta() const override { return eta_; }

  std::vector<ConditioningVector> propose(int generation,
                                          const std::vector<EvalRecord>& history,
                                          Rng& rng) override {
    std::vector<ConditioningVector> out;
    if (generation == 0) {
      if (library_) {
        const std::size_t k = std::min<std::size_t>(
            static_cast<std::size_t>(cfg_.retrieval_seeds),
            static_cast<std::size_t>(cfg_.population));
        out = retrieve_seeds(spec_, *library_, k);
      }
      while (out.size() < static_cast<std::size_t>(cfg_.population))
        out.push_back(detail::random_point(rng));
      return out;
    }

    if (population_.empty()) {
      // Every candidate so far failed to evaluate; fall back to exploration.
      for (int i = 0; i < cfg_.population; ++i)
        out.push_back(detail::random_point(rng));
      return out;
    }

    for (const EvalRecord& parent : population_) {
      std::vector<GradientSample> samples;
      samples.reserve(history.size());
      for (const auto& rec : history) {
        if (rec.eval_failed || rec.eval_index == parent.eval_index) continue;
        samples.push_back({to_eigen(rec.x),
                           record_utility(rec, weights_, cfg_),
                           rec.generation});
      }
      const double yk = record_utility(parent, weights_, cfg_);
      const GradientEstimate grad = estimate_gradient(
          samples, to_eigen(parent.x), yk, generation - 1, cfg_);
      UpdateResult update = propose_update(parent.x, grad, yk, /*y_target=*/0.0,
                                           eta_, momentum_, rng, cfg_);

      // Re-proposing an already-evaluated point wastes a simulation; nudge it.
      bool duplicate = false;
      for (const auto& rec : history) {
        if (squared_distance(update.x, rec.x) <=
            cfg_.duplicate_eps * cfg_.duplicate_eps) {
          duplicate = true;
          break;
        }
      }
      if (duplicate) {
        for (double& c : update.x.coords)
          c += rng.uniform(-cfg_.duplicate_perturb, cfg_.duplicate_perturb);
        update.x = clamp_to_unit_box(update.x);
      }
      out.push_back(update.x);
    }
    return out;
  }

  void integrate(const std::vector<EvalRecord>& history, std::size_t fresh_begin,
                 int generation, Rng&) override {
    const std::span<const EvalRecord> fresh(history.data() + fresh_begin,
                                            history.size() - fresh_begin);
    if (generation == 0) {
      population_.assign(fresh.begin(), fresh.end());
      std::erase_if(population_, [](const EvalRecord& r) { return r.eval_failed; });
    } else {
      // Step-size adaptation from parent/offspring utility pairs.
      for (std::size_t i = 0; i < fresh.size() && i < population_.size(); ++i) {
        const double parent_u = record_utility(population_[i], weights_, cfg_);
        const double child_u = record_utility(fresh[i], weights_, cfg_);
        eta_ *= (child_u > parent_u) ? cfg_.eta_shrink : cfg_.eta_grow;
        eta_ = std::clamp(eta_, cfg_.eta_min, cfg_.eta_max);
      }

      std::vector<EvalRecord> merged = population_;
      for (const auto& rec : fresh)
        if (!rec.eval_failed) merged.push_back(rec);
      population_ = detail::survivors(merged, spec_,
                                      static_cast<std::size_t>(cfg_.population));
    }

    // Cumulative best per-objective error, one row per generation.
    std::vector<double> row(spec_.objectives.size(),
                            std::numeric_limits<double>::infinity());
    if (!best_series_.empty()) row = best_series_.back();
    for (const auto& rec : fresh) {
      if (rec.eval_failed) continue;
      for (std::size_t j = 0; j < row.size(); ++j)
        row[j] = std::min(row[j], std::abs(rec.signed_errors[j]));
    }
    best_series_.push_back(std::move(row));

    std::vector<Trend> trends(spec_.objectives.size(), Trend::neutral);
    for (std::size_t j = 0; j < trends.size(); ++j)
      trends[j] = classify_trend(detect_stagnation(best_series_, j, cfg_), cfg_);
    update_weights(weights_, trends, cfg_);
  }

 private:
  const TaskSpec& spec_;
  SaesConfig cfg_;
  const SeedLibrary* library_;
  std::vector<EvalRecord> population_;
  std::vector<std::vector<double>> best_series_;
  std::vector<double> weights_;
  Eigen::VectorXd momentum_;
  double eta_;
};

// Generational NSGA-II over the same conditioning space: binary tournament
// mating on (rank, crowding), SBX plus polynomial mutation, elitist survivor
// selection shared with SAES.
class Nsga2Stepper : public Stepper {
 public:
  Nsga2Stepper(const TaskSpec& spec, const Nsga2Config& cfg)
      : spec_(spec), cfg_(cfg) {}

  const char* name() const override { return "nsga2"; }

  std::vector<ConditioningVector> propose(int generation,
                                          const std::vector<EvalRecord>&,
                                          Rng& rng) override {
    std::vector<ConditioningVector> out;
    if (generation == 0 || population_.empty()) {
      for (int i = 0; i < cfg_.population; ++i)
        out.push_back(detail::random_point(rng));
      return out;
    }

    // Rank and crowding of the current population for tournament selection.
    std::vector<pareto::ObjectivePoint> points;
    for (std::size_t i = 0; i < population_.size(); ++i)
      points.push_back(to_objective_point(population_[i], spec_, static_cast<int>(i)));
    const auto fronts = pareto::non_dominated_sort(points);
    std::vector<int> rank(points.size(), 0);
    std::vector<double> crowd(points.size(), 0.0);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
      std::vector<pareto::ObjectivePoint> front;
      for (int id : fronts[f]) front.push_back(points[static_cast<std::size_t>(id)]);
      const auto dist = pareto::crowding_distance(front);
      for (std::size_t i = 0; i < front.size(); ++i) {
        rank[static_cast<std::size_t>(front[i].id)] = static_cast<int>(f);
        crowd[static_cast<std::size_t>(front[i].id)] = dist[i];
      }
    }

    auto tournament = [&]() -> const ConditioningVector& {
      const std::size_t a = rng.index(population_.size());
      const std::size_t b = rng.index(population_.size());
      bool pick_a;
      if (rank[a] != rank[b]) pick_a = rank[a] < rank[b];
      else if (crowd[a] != crowd[b]) pick_a = crowd[a] > crowd[b];
      else pick_a = a <= b;
      return population_[pick_a ? a : b].x;
    };

    while (out.size() < static_cast<std::size_t>(cfg_.population)) {
      const ConditioningVector& p1 = tournament();
      const ConditioningVector& p2 = tournament();
      auto [c1, c2] = sbx_crossover(p1, p2, cfg_, rng);
      out.push_back(polynomial_mutation(c1, cfg_, rng));
      if (out.size() < static_cast<std::size_t>(cfg_.population))
        out.push_back(polynomial_mutation(c2, cfg_, rng));
    }
    return out;
  }

  void integrate(const std::vector<EvalRecord>& history, std::size_t fresh_begin,
                 int generation, Rng&) override {
    const std::span<const EvalRecord> fresh(history.data() + fresh_begin,
                                            history.size() - fresh_begin);
    if (generation == 0) {
      population_.assign(fresh.begin(), fresh.end());
      std::erase_if(population_, [](const EvalRecord& r) { return r.eval_failed; });
      return;
    }
    std::vector<EvalRecord> merged = population_;
    for (const auto& rec : fresh)
      if (!rec.eval_failed) merged.push_back(rec);
    population_ = detail::survivors(merged, spec_,
                                    static_cast<std::size_t>(cfg_.population));
  }

 private:
  const TaskSpec& spec_;
  Nsga2Config cfg_;
  std::vector<EvalRecord> population_;
};

// Uniform random sampling under the shared budget.
class RandomStepper : public Stepper {
 public:
  explicit RandomStepper(int population) : population_(population) {}
  const char* name() const override { return "random"; }

  std::vector<ConditioningVector> propose(int, const std::vector<EvalRecord>&,
                                          Rng& rng) override {
    std::vector<ConditioningVector> out;
    for (int i = 0; i < population_; ++i)
      out.push_back(detail::random_point(rng));
    return out;
  }

  void integrate(const std::vector<EvalRecord>&, std::size_t, int, Rng&) override {}

 private:
  int population_;
};

// Single-pass generation: the best retrieval seed (or the box center when no
// library is available), evaluated once.
class OneShotStepper : public Stepper {
 public:
  OneShotStepper(const TaskSpec& spec, const SeedLibrary* library)
      : spec_(spec), library_(library) {}

  const char* name() const override { return "oneshot"; }

  std::vector<ConditioningVector> propose(int, const std::vector<EvalRecord>&,
                                          Rng&) override {
    if (library_) {
      auto seeds = retrieve_seeds(spec_, *library_, 1);
      if (!seeds.empty()) return {seeds.front()};
    }
    return {ConditioningVector(0.5, 0.5, 0.5)};
  }

  void integrate(const std::vector<EvalRecord>&, std::size_t, int, Rng&) override {}

 private:
  const TaskSpec& spec_;
  const SeedLibrary* library_;
};

// ---------------------------------------------------------------------------
// Run driver.

struct GenerationStats {
  int generation = 0;
  double best_mean_abs_error = 0.0;
  double best_utility = 0.0;
  double eta = 0.0;
  std::vector<double> weights;
};

struct RunResult {
  std::string task_id;
  std::string method;
  std::uint64_t seed = 0;
  std::vector<EvalRecord> history;
  std::vector<EvalRecord> archive;
  std::vector<GenerationStats> per_generation;
  bool success = false;
  std::string status;
  int iterations = 0;
  int evaluations = 0;
  std::vector<double> final_weights;
  double final_eta = 0.0;
  double wall_clock_s = 0.0;  // reported separately; not part of the record file
  FeasibilityReport feasibility;
};

// Executes one optimization run behind the pipeline state machine: parse
// (feasibility screen, already applied by the caller), then
// generate/simulate/decide cycles until the task is satisfied or the budget
// runs out. Candidate evaluation failures degrade the affected record, never
// the run.
inline RunResult run_pipeline(const TaskSpec& spec, Stepper& stepper,
                              const Evaluator& evaluator, std::uint64_t seed,
                              const SaesConfig& saes_cfg,
                              FeasibilityReport feasibility = {}) {
  const auto t_start = std::chrono::steady_clock::now();

  RunResult result;
  result.task_id = spec.task_id;
  result.method = stepper.name();
  result.seed = seed;
  result.feasibility = std::move(feasibility);

  PipelinePhase state;
  state = step_pipeline(state, {Phase::parse, PhaseStatus::ok, true});

  Rng rng(seed);
  bool satisfied_run = false;

  while (state.phase == Phase::generate) {
    const int generation = state.generation;
    const auto proposals = stepper.propose(generation, result.history, rng);
    state = step_pipeline(state, {Phase::generate, PhaseStatus::ok, true});

    const std::size_t fresh_begin = result.history.size();
    std::vector<double> w = stepper.weights();
    if (w.empty()) w.assign(spec.objectives.size(), 1.0);

    for (const auto& proposal : proposals) {
      if (result.evaluations >= spec.budget.max_evaluations) break;
      Evaluation eval = evaluator(proposal);
      ++result.evaluations;

      EvalRecord rec;
      rec.x = clamp_to_unit_box(proposal);
      rec.generation = generation;
      rec.clamped = eval.clamped;
      rec.eval_index = static_cast<int>(result.history.size());
      if (eval.failed) {
        rec.eval_failed = true;
        rec.feasible = false;
        rec.signed_errors.assign(spec.objectives.size(), 1e6);
        rec.satisfied.assign(spec.objectives.size(), false);
        rec.utility = scalar_utility(rec.signed_errors, w, false, saes_cfg);
      } else {
        rec.properties = eval.properties;
        rec.feasible = eval.properties.feasible;
        rec.signed_errors = objective_errors_signed(eval.properties, spec);
        for (const auto& o : spec.objectives)
          rec.satisfied.push_back(satisfied(o, eval.properties.get(o.property)));
        rec.utility = scalar_utility(rec.signed_errors, w, rec.feasible, saes_cfg);
        if (std::all_of(rec.satisfied.begin(), rec.satisfied.end(),
                        [](bool b) { return b; }))
          satisfied_run = true;
      }
      result.history.push_back(std::move(rec));
    }

    for (std::size_t i = fresh_begin; i < result.history.size(); ++i)
      archive_insert(result.archive, result.history[i], spec, saes_cfg);

    stepper.integrate(result.history, fresh_begin, generation, rng);

    // Per-generation best-so-far statistics for the series file.
    GenerationStats stats;
    stats.generation = generation;
    stats.eta = stepper.eta();
    stats.weights = stepper.weights();
    double best_err = std::numeric_limits<double>::infinity();
    double best_util = std::numeric_limits<double>::infinity();
    for (const auto& rec : result.history) {
      if (rec.eval_failed) continue;
      double mean_abs = 0.0;
      for (double e : rec.signed_errors) mean_abs += std::abs(e);
      mean_abs /= static_cast<double>(spec.objectives.size());
      best_err = std::min(best_err, mean_abs);
      best_util = std::min(best_util, rec.utility);
    }
    stats.best_mean_abs_error = best_err;
    stats.best_utility = best_util;
    result.per_generation.push_back(std::move(stats));

    const bool budget_remaining =
        state.generation + 1 <= spec.budget.max_generations &&
        result.evaluations < spec.budget.max_evaluations;
    state = resolve_simulation(
        state, satisfied_run ? PhaseStatus::satisfied : PhaseStatus::iterate,
        budget_remaining);
  }

  result.success = satisfied_run;
  result.status = to_string(state.last_status);
  result.iterations = state.iterations;
  result.final_weights = stepper.weights();
  result.final_eta = stepper.eta();

  state = step_pipeline(state, {Phase::report, PhaseStatus::ok, false});
  if (state.phase != Phase::terminated)
    throw std::logic_error("pipeline did not terminate");

  result.wall_clock_s = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t_start)
                            .count();
  return result;
}

enum class Method { saes, nsga2, random_search, one_shot };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::saes: return "saes";
    case Method::nsga2: return "nsga2";
    case Method::random_search: return "random";
    case Method::one_shot: return "oneshot";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "saes") return Method::saes;
  if (s == "nsga2") return Method::nsga2;
  if (s == "random") return Method::random_search;
  if (s == "oneshot") return Method::one_shot;
  throw std::invalid_argument("unknown method: " + s);
}

struct RunOptions {
  SaesConfig saes;
  Nsga2Config nsga2;
  const SeedLibrary* library = nullptr;
};

inline RunResult run_method(const TaskSpec& spec, Method method,
                            const RunOptions& options, const Evaluator& evaluator,
                            std::uint64_t seed) {
  TaskSpec local = spec;
  const FeasibilityReport feasibility = check_stiffness_feasibility(local);
  switch (method) {
    case Method::saes: {
      SaesStepper stepper(local, options.saes, options.library);
      return run_pipeline(local, stepper, evaluator, seed, options.saes, feasibility);
    }
    case Method::nsga2: {
      Nsga2Config cfg = options.nsga2;
      cfg.population = options.saes.population;
      Nsga2Stepper stepper(local, cfg);
      return run_pipeline(local, stepper, evaluator, seed, options.saes, feasibility);
    }
    case Method::random_search: {
      RandomStepper stepper(options.saes.population);
      return run_pipeline(local, stepper, evaluator, seed, options.saes, feasibility);
    }
    case Method::one_shot: {
      local.budget.max_generations = 0;
      local.budget.max_evaluations = 1;
      OneShotStepper stepper(local, options.library);
      return run_pipeline(local, stepper, evaluator, seed, options.saes, feasibility);
    }
  }
  throw std::logic_error("bad method enum");
}

}  // namespace voxmat

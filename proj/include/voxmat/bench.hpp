#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <thread>
#include <vector>

#include "voxmat/evaluator.hpp"
#include "voxmat/metrics.hpp"
#include "voxmat/pipeline.hpp"
#include "voxmat/runresult_io.hpp"
#include "voxmat/seed_library.hpp"

namespace voxmat {

struct BenchConfig {
  int resolution = 16;
  fea::SolverConfig solver;
  SaesConfig saes;
  Nsga2Config nsga2;
  int workers = 0;  // 0 = hardware concurrency
  std::filesystem::path out_dir = "out";
  const SeedLibrary* library = nullptr;
};

struct BenchCell {
  TaskSpec task;
  Method method = Method::saes;
  std::uint64_t seed = 0;
};

namespace detail_bench {

inline std::string cell_basename(const BenchCell& cell) {
  return std::string(to_string(cell.method)) + "_" + std::to_string(cell.seed);
}

}  // namespace detail_bench

// Executes the Cartesian product of (task, method, seed) cells, persisting a
// RunResult file, a report text and a timing sidecar per cell plus the
// aggregate report and the per-generation series file. Cells run in parallel
// up to the worker count; each cell is internally sequential and evaluation
// caches are shared per task, so results do not depend on scheduling.
inline std::vector<metrics::RunSummary> run_benchmark(
    const std::vector<TaskSpec>& tasks, const std::vector<Method>& methods,
    const std::vector<std::uint64_t>& seeds, const BenchConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);

  std::vector<BenchCell> cells;
  for (const auto& task : tasks)
    for (Method m : methods)
      for (std::uint64_t seed : seeds) cells.push_back({task, m, seed});

  std::map<std::string, std::shared_ptr<EvalCache>> caches;
  for (const auto& task : tasks)
    caches[task.task_id] = std::make_shared<EvalCache>();

  std::vector<RunResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  const unsigned workers =
      cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                      : std::max(1u, std::thread::hardware_concurrency());

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const BenchCell& cell = cells[i];
      RunOptions opt;
      opt.saes = cfg.saes;
      opt.nsga2 = cfg.nsga2;
      opt.library = cfg.library;
      const Evaluator evaluator = make_physics_evaluator(
          cell.task, cfg.resolution, cfg.solver, caches.at(cell.task.task_id));
      results[i] = run_method(cell.task, cell.method, opt, evaluator, cell.seed);
    }
  };

  std::vector<std::thread> pool;
  for (unsigned w = 0; w + 1 < workers && w + 1 < cells.size(); ++w)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Persist per-cell outputs.
  std::vector<metrics::RunSummary> summaries;
  std::ofstream series(cfg.out_dir / "series.csv");
  series << "task_id,method,seed,generation,best_mean_abs_error,best_utility\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const BenchCell& cell = cells[i];
    const RunResult& run = results[i];
    const fs::path task_dir = cfg.out_dir / cell.task.task_id;
    fs::create_directories(task_dir);
    const std::string base = detail_bench::cell_basename(cell);

    std::ofstream(task_dir / (base + ".jsonl")) << runresult_to_jsonl(run);
    std::ofstream(task_dir / (base + ".txt"))
        << run_report_text(run, cell.task, cfg.saes);
    nlohmann::ordered_json timing;
    timing["wall_clock_s"] = run.wall_clock_s;
    std::ofstream(task_dir / (base + ".timing.json")) << timing.dump() << "\n";

    for (const auto& g : run.per_generation) {
      series << cell.task.task_id << "," << to_string(cell.method) << ","
             << cell.seed << "," << g.generation << "," << g.best_mean_abs_error
             << "," << g.best_utility << "\n";
    }
    summaries.push_back(metrics::summarize_run(run));
  }

  const auto rows = metrics::aggregate_report(summaries);
  std::ofstream(cfg.out_dir / "report.csv") << metrics::report_csv(rows);
  std::ofstream(cfg.out_dir / "report.txt") << metrics::report_text(rows);
  return summaries;
}

// Re-aggregates an existing output directory from its run files, picking up
// timing sidecars when present.
inline std::vector<metrics::RunSummary> reaggregate(const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::vector<metrics::RunSummary> summaries;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(out_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    metrics::RunSummary s = runsummary_from_jsonl(file);
    fs::path timing = file;
    timing.replace_extension(".timing.json");
    if (fs::exists(timing)) {
      std::ifstream in(timing);
      const nlohmann::json j = nlohmann::json::parse(in);
      s.wall_clock_s = j.value("wall_clock_s", 0.0);
    }
    summaries.push_back(std::move(s));
  }
  const auto rows = metrics::aggregate_report(summaries);
  std::ofstream(out_dir / "report.csv") << metrics::report_csv(rows);
  std::ofstream(out_dir / "report.txt") << metrics::report_text(rows);
  return summaries;
}

}  // namespace voxmat

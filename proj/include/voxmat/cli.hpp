#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "voxmat/bench.hpp"
#include "voxmat/generator.hpp"
#include "voxmat/runresult_io.hpp"
#include "voxmat/seed_library.hpp"
#include "voxmat/task.hpp"

namespace voxmat {

namespace cli_detail {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

inline std::vector<TaskSpec> load_tasks_arg(const std::string& arg) {
  namespace fs = std::filesystem;
  std::vector<TaskSpec> tasks;
  const fs::path path(arg);
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) tasks.push_back(load_task(f));
  } else {
    tasks.push_back(load_task(path));
  }
  if (tasks.empty())
    throw TaskParseError("no task files found under " + arg);
  return tasks;
}

inline ConditioningVector parse_coords(const std::string& arg) {
  std::vector<double> coords;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) coords.push_back(std::stod(item));
  if (coords.size() != kConditioningDim)
    throw std::invalid_argument("--coords expects 3 comma-separated values");
  return ConditioningVector(coords);
}

}  // namespace cli_detail

inline int cli_main(int argc, char** argv) {
  using namespace cli_detail;
  CLI::App app{"voxmat: inverse microstructure design toolkit"};
  app.require_subcommand(1);

  // --- run ------------------------------------------------------------
  auto* run = app.add_subcommand("run", "run an optimization benchmark sweep");
  std::string tasks_arg;
  std::vector<std::string> method_names{"saes"};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  int resolution = 16;
  std::string out_dir = "out";
  int workers = 0;
  std::string momentum = "on";
  std::string library_path;
  double residual_tol = 1e-6;
  run->add_option("--tasks", tasks_arg, "task file or directory of task files")
      ->required()
      ->envname("VOXMAT_TASKS");
  run->add_option("--methods", method_names,
                  "methods to run: saes,nsga2,random,oneshot")
      ->delimiter(',')
      ->envname("VOXMAT_METHODS");
  run->add_option("--seeds", seeds, "run seeds")
      ->delimiter(',')
      ->envname("VOXMAT_SEEDS");
  run->add_option("--resolution", resolution, "voxel resolution per edge")
      ->envname("VOXMAT_RESOLUTION");
  run->add_option("--out", out_dir, "output directory")->envname("VOXMAT_OUT");
  run->add_option("--workers", workers, "parallel worker count (0 = auto)")
      ->envname("VOXMAT_WORKERS");
  run->add_option("--momentum", momentum, "momentum term: on|off")
      ->check(CLI::IsMember({"on", "off"}))
      ->envname("VOXMAT_MOMENTUM");
  run->add_option("--seed-library", library_path, "seed library file")
      ->envname("VOXMAT_SEED_LIBRARY");
  run->add_option("--residual-tol", residual_tol, "solver residual tolerance")
      ->envname("VOXMAT_RESIDUAL_TOL");

  // --- simulate ---------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "evaluate one voxel grid");
  std::string sim_grid, sim_task;
  simulate->add_option("--grid", sim_grid, "voxel grid file")->required();
  simulate->add_option("--task", sim_task, "task file naming objectives and material")
      ->required();
  simulate->add_option("--residual-tol", residual_tol, "solver residual tolerance");

  // --- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "emit a voxel grid from coordinates");
  std::string gen_coords = "0.5,0.5,0.5";
  std::string gen_out = "grid.voxg";
  int gen_resolution = 32;
  gen->add_option("--coords", gen_coords, "conditioning coordinates c0,c1,c2");
  gen->add_option("--resolution", gen_resolution, "voxel resolution per edge");
  gen->add_option("--out", gen_out, "output grid file");

  // --- report ---------------------------------------------------------
  auto* report = app.add_subcommand("report", "re-aggregate an output directory");
  std::string report_dir;
  report->add_option("--out", report_dir, "existing output directory")->required();

  // --- seedlib ----------------------------------------------------------
  auto* seedlib = app.add_subcommand("seedlib", "regenerate the seed library");
  std::string seedlib_out = "data/seed_library.json";
  int seedlib_resolution = 16;
  int seedlib_lattice = 5;
  seedlib->add_option("--out", seedlib_out, "library output file");
  seedlib->add_option("--resolution", seedlib_resolution, "evaluation resolution");
  seedlib->add_option("--lattice", seedlib_lattice, "lattice points per axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      BenchConfig cfg;
      cfg.resolution = resolution;
      cfg.solver.residual_tol = residual_tol;
      cfg.workers = workers;
      cfg.out_dir = out_dir;
      cfg.saes.use_momentum = (momentum == "on");
      SeedLibrary library;
      if (!library_path.empty()) {
        library = SeedLibrary::load(library_path);
        cfg.library = &library;
      }
      std::vector<TaskSpec> tasks;
      std::vector<Method> methods;
      try {
        tasks = load_tasks_arg(tasks_arg);
        for (const auto& name : method_names) methods.push_back(parse_method(name));
      } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
      }
      const auto summaries = run_benchmark(tasks, methods, seeds, cfg);
      const auto rows = metrics::aggregate_report(summaries);
      std::cout << metrics::report_text(rows);
      return kExitOk;
    }

    if (*simulate) {
      TaskSpec spec;
      VoxelGrid grid(4);
      try {
        spec = load_task(sim_task);
        grid = VoxelGrid::load(sim_grid);
      } catch (const TaskParseError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
      }
      fea::SolverConfig solver;
      solver.residual_tol = residual_tol;
      const PropertyVector props = fea::evaluate_properties(grid, spec, solver);
      nlohmann::ordered_json j;
      j["resolution"] = grid.resolution();
      j["feasible"] = props.feasible;
      for (Property p : {Property::E, Property::G, Property::nu, Property::kappa,
                         Property::sigma, Property::vf, Property::Wp})
        if (props.has(p)) j[to_string(p)] = props.get(p);
      auto& stats = j["solver_stats"] = nlohmann::ordered_json::array();
      for (const auto& s : props.solver_stats)
        stats.push_back({{"label", s.label},
                         {"iterations", s.iterations},
                         {"final_residual", s.final_residual}});
      std::cout << j.dump(2) << "\n";
      return kExitOk;
    }

    if (*gen) {
      ConditioningVector coords(0.5, 0.5, 0.5);
      try {
        coords = parse_coords(gen_coords);
      } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
      }
      const VoxelGrid grid = generate(coords, gen_resolution);
      grid.save(gen_out);
      std::cout << "wrote " << gen_out << " (n=" << grid.resolution()
                << ", vf=" << volume_fraction(grid) << ")\n";
      return kExitOk;
    }

    if (*report) {
      if (!std::filesystem::is_directory(report_dir)) {
        std::cerr << "configuration error: not a directory: " << report_dir << "\n";
        return kExitConfig;
      }
      const auto summaries = reaggregate(report_dir);
      const auto rows = metrics::aggregate_report(summaries);
      std::cout << metrics::report_text(rows);
      return kExitOk;
    }

    if (*seedlib) {
      fea::SolverConfig solver;
      const SeedLibrary lib =
          build_seed_library(seedlib_lattice, seedlib_resolution, solver);
      std::filesystem::create_directories(
          std::filesystem::path(seedlib_out).parent_path());
      lib.save(seedlib_out);
      std::cout << "wrote " << seedlib_out << " (" << lib.entries.size()
                << " entries)\n";
      return kExitOk;
    }
  } catch (const TaskParseError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::runtime_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}

}  // namespace voxmat

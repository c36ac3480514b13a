#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "voxmat/fea/evaluate.hpp"
#include "voxmat/generator.hpp"
#include "voxmat/property.hpp"
#include "voxmat/task.hpp"

namespace voxmat {

struct Evaluation {
  PropertyVector properties;
  bool clamped = false;
  bool failed = false;
  std::string failure_reason;
};

using Evaluator = std::function<Evaluation(const ConditioningVector&)>;

// Grid-content keyed memoization of property evaluations. Evaluations are
// pure, so a cache hit returns exactly what a fresh solve would; sharing one
// cache across runs of the same task only changes wall-clock time.
class EvalCache {
 public:
  bool lookup(std::uint64_t key, PropertyVector& out) const {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = map_.find(key);
    if (it == map_.end()) return false;
    out = it->second;
    return true;
  }

  void store(std::uint64_t key, const PropertyVector& props) {
    std::lock_guard<std::mutex> lock(mu_);
    map_.emplace(key, props);
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return map_.size();
  }

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::uint64_t, PropertyVector> map_;
};

// The production evaluator: conditioning point -> voxel grid -> physics.
// Solver faults are reported per candidate, never thrown.
inline Evaluator make_physics_evaluator(const TaskSpec& spec, int resolution,
                                        const fea::SolverConfig& solver,
                                        std::shared_ptr<EvalCache> cache = {}) {
  return [spec, resolution, solver, cache](const ConditioningVector& x) {
    Evaluation eval;
    try {
      const VoxelGrid grid = generate(x, resolution, &eval.clamped);
      const std::uint64_t key = grid.content_hash();
      if (cache && cache->lookup(key, eval.properties)) return eval;
      eval.properties = fea::evaluate_properties(grid, spec, solver);
      if (cache) cache->store(key, eval.properties);
    } catch (const std::exception& e) {
      eval.failed = true;
      eval.failure_reason = e.what();
    }
    return eval;
  };
}

}  // namespace voxmat

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "voxmat/generator.hpp"
#include "voxmat/objective.hpp"
#include "voxmat/pareto.hpp"
#include "voxmat/property.hpp"
#include "voxmat/rng.hpp"
#include "voxmat/task.hpp"

namespace voxmat {

// Hyperparameters of the simulation-aware evolutionary search. Defaults
// follow the published configuration: population 20, archive 50, ten
// generations, five-neighbor perception window with 0.5 temporal decay and
// 2.5 MAD outlier rejection, step 0.1, noise 0.05, momentum 0.3, three-
// generation stagnation window with weight range [0.1, 2.0].
struct SaesConfig {
  int population = 20;
  int archive_capacity = 50;
  int window_m = 5;
  double temporal_decay = 0.5;
  double outlier_mad = 2.5;
  double base_step = 0.1;
  double noise_beta = 0.05;
  double momentum = 0.3;
  bool use_momentum = true;
  int stagnation_window = 3;
  double weight_min = 0.1;
  double weight_max = 2.0;
  double stagnation_boost = 0.25;      // w *= 1 + boost when stagnant
  double fast_convergence_cut = 0.10;  // w *= 1 - cut on fast progress
  double stagnation_threshold = 1e-3;  // |gamma| below this counts as flat
  double fast_threshold = 0.05;        // gamma above this counts as fast
  double eta_min = 0.01;
  double eta_max = 0.3;
  double eta_grow = 1.2;
  double eta_shrink = 0.5;
  double duplicate_eps = 1e-6;
  double duplicate_perturb = 0.05;
  double infeasible_penalty = 10.0;
  int retrieval_seeds = 10;
};

// One evaluated design: conditioning point, simulated properties, error
// bookkeeping and provenance flags.
struct EvalRecord {
  ConditioningVector x;
  PropertyVector properties;
  std::vector<double> signed_errors;
  std::vector<bool> satisfied;
  double utility = 0.0;
  int generation = 0;
  bool feasible = true;
  bool clamped = false;
  bool eval_failed = false;
  int eval_index = 0;
};

inline std::vector<double> objective_errors_signed(const PropertyVector& props,
                                                   const TaskSpec& spec) {
  std::vector<double> errors;
  errors.reserve(spec.objectives.size());
  for (const auto& o : spec.objectives)
    errors.push_back(signed_relative_error(o, props.get(o.property)));
  return errors;
}

// Weighted sum of per-objective error magnitudes, plus a flat penalty for
// geometrically infeasible designs. This is the scalar the gradient
// perception and the update rule operate on; its target value is zero.
inline double scalar_utility(std::span<const double> signed_errors,
                             std::span<const double> weights, bool feasible,
                             const SaesConfig& cfg) {
  double u = 0.0;
  for (std::size_t j = 0; j < signed_errors.size(); ++j)
    u += weights[j] * std::abs(signed_errors[j]);
  if (!feasible) u += cfg.infeasible_penalty;
  return u;
}

inline double record_utility(const EvalRecord& rec,
                             std::span<const double> weights,
                             const SaesConfig& cfg) {
  return scalar_utility(rec.signed_errors, weights, rec.feasible, cfg);
}

// Objective-space image of a record for dominance comparisons: match targets
// become error magnitudes to minimize, threshold objectives keep their raw
// property value and direction.
inline pareto::ObjectivePoint to_objective_point(const EvalRecord& rec,
                                                 const TaskSpec& spec,
                                                 int id) {
  pareto::ObjectivePoint p;
  p.id = id;
  for (std::size_t j = 0; j < spec.objectives.size(); ++j) {
    const auto& o = spec.objectives[j];
    switch (o.kind) {
      case ObjectiveKind::match_target:
        p.values.push_back(std::abs(rec.signed_errors[j]));
        p.directions.push_back(pareto::Direction::minimize);
        break;
      case ObjectiveKind::maximize:
        p.values.push_back(rec.properties.get(o.property));
        p.directions.push_back(pareto::Direction::maximize);
        break;
      case ObjectiveKind::minimize:
        p.values.push_back(rec.properties.get(o.property));
        p.directions.push_back(pareto::Direction::minimize);
        break;
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Perception: local gradient from the evaluation history.

enum class GradientFlag { ok, rank_deficient_ridge, insufficient_neighbors };

struct GradientEstimate {
  Eigen::VectorXd g;
  int neighbor_count = 0;
  GradientFlag flag = GradientFlag::ok;

  bool usable() const { return flag != GradientFlag::insufficient_neighbors; }
};

struct GradientSample {
  Eigen::VectorXd x;
  double y = 0.0;
  int generation = 0;
};

inline Eigen::VectorXd to_eigen(const ConditioningVector& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.coords.data(),
                                           static_cast<long>(x.coords.size()));
}

// Composite sample weight: spatial proximity times temporal freshness,
//   w = 1 / (1 + ||xj - xk||^2) * exp(-lambda (N - tj) / N),
// with the temporal factor collapsing to 1 before the first generation.
inline double composite_weight(double squared_dist, int sample_generation,
                               int current_generation, double decay) {
  const double spatial = 1.0 / (1.0 + squared_dist);
  double temporal = 1.0;
  if (current_generation > 0) {
    temporal = std::exp(-decay *
                        static_cast<double>(current_generation - sample_generation) /
                        static_cast<double>(current_generation));
  }
  return spatial * temporal;
}

// Weighted least squares fit of a local linear model around (xk, yk): selects
// the M nearest history samples, drops response outliers beyond 2.5 MAD from
// the window median, weights the survivors by composite_weight and solves the
// normal equations. A rank-deficient normal matrix gets a small ridge and is
// flagged; fewer than two usable neighbors yield a zero gradient.
inline GradientEstimate estimate_gradient(std::span<const GradientSample> history,
                                          const Eigen::VectorXd& xk, double yk,
                                          int current_generation,
                                          const SaesConfig& cfg) {
  const long d = xk.size();
  GradientEstimate est;
  est.g = Eigen::VectorXd::Zero(d);

  std::vector<std::size_t> candidates;
  candidates.reserve(history.size());
  for (std::size_t i = 0; i < history.size(); ++i)
    if (std::isfinite(history[i].y)) candidates.push_back(i);

  std::vector<double> dist2(history.size(), 0.0);
  for (std::size_t i : candidates) dist2[i] = (history[i].x - xk).squaredNorm();
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return dist2[a] < dist2[b]; });
  if (candidates.size() > static_cast<std::size_t>(cfg.window_m))
    candidates.resize(static_cast<std::size_t>(cfg.window_m));

  // Robust outlier filter on the window responses.
  if (candidates.size() >= 3) {
    std::vector<double> ys;
    for (std::size_t i : candidates) ys.push_back(history[i].y);
    auto median_of = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      const std::size_t n = v.size();
      return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    const double med = median_of(ys);
    std::vector<double> dev;
    for (double y : ys) dev.push_back(std::abs(y - med));
    const double mad = median_of(dev);
    if (mad > 0.0) {
      std::vector<std::size_t> kept;
      for (std::size_t i : candidates)
        if (std::abs(history[i].y - med) <= cfg.outlier_mad * mad)
          kept.push_back(i);
      candidates = std::move(kept);
    }
  }

  est.neighbor_count = static_cast<int>(candidates.size());
  if (candidates.size() < 2) {
    est.flag = GradientFlag::insufficient_neighbors;
    return est;
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  for (std::size_t i : candidates) {
    const Eigen::VectorXd dx = history[i].x - xk;
    const double w = composite_weight(dist2[i], history[i].generation,
                                      current_generation, cfg.temporal_decay);
    A.noalias() += w * dx * dx.transpose();
    b.noalias() += w * dx * (history[i].y - yk);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  const double lambda_max = eig.eigenvalues().maxCoeff();
  const long rank = (eig.eigenvalues().array() >
                     std::max(lambda_max, 0.0) * 1e-12).count();
  if (rank < d) {
    const double ridge = 1e-8 * A.trace() / static_cast<double>(d);
    A += std::max(ridge, std::numeric_limits<double>::min()) *
         Eigen::MatrixXd::Identity(d, d);
    est.flag = GradientFlag::rank_deficient_ridge;
  }
  est.g = A.ldlt().solve(b);
  if (!est.g.allFinite()) {
    est.g.setZero();
    est.flag = GradientFlag::insufficient_neighbors;
  }
  return est;
}

// ---------------------------------------------------------------------------
// Action: gradient-guided parameter update.

inline int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

struct UpdateResult {
  ConditioningVector x;
  Eigen::VectorXd step;  // displacement before box clamping
  bool clamped = false;
};

// x' = xk + eta sgn(y_tgt - yk) g/||g|| + beta xi, with an optional momentum
// buffer replacing the raw directed step by its exponential moving average.
// Gaussian noise is drawn every call so the random stream does not depend on
// the gradient flag. The result is clamped to the generator's unit box.
inline UpdateResult propose_update(const ConditioningVector& xk,
                                   const GradientEstimate& grad, double yk,
                                   double y_target, double eta,
                                   Eigen::VectorXd& momentum_buffer, Rng& rng,
                                   const SaesConfig& cfg) {
  const long d = static_cast<long>(xk.dim());
  Eigen::VectorXd directed = Eigen::VectorXd::Zero(d);
  const double gnorm = grad.usable() ? grad.g.norm() : 0.0;
  if (gnorm > 0.0) {
    directed = (eta * sign_of(y_target - yk) / gnorm) * grad.g;
  }

  Eigen::VectorXd step = directed;
  if (cfg.use_momentum) {
    momentum_buffer = cfg.momentum * momentum_buffer + directed;
    step = momentum_buffer;
  }

  Eigen::VectorXd noise(d);
  for (long i = 0; i < d; ++i) noise(i) = rng.gaussian();

  UpdateResult out;
  out.x = xk;
  out.step = step + cfg.noise_beta * noise;
  for (long i = 0; i < d; ++i)
    out.x.coords[static_cast<std::size_t>(i)] += out.step(i);
  out.x = clamp_to_unit_box(out.x, &out.clamped);
  return out;
}

// ---------------------------------------------------------------------------
// Integration: stagnation detection and adaptive weights.

enum class Trend { stagnant, fast, neutral };

// Relative improvement of the best error over the stagnation window:
//   gamma = (best(t - W) - best(t)) / (best(t - W) + 1e-9).
inline double improvement_ratio(double best_start, double best_now) {
  return (best_start - best_now) / (best_start + 1e-9);
}

// best_series[g][j] = best |error_j| over everything evaluated up to
// generation g. Returns nothing until a full window is recorded.
inline std::optional<double> detect_stagnation(
    const std::vector<std::vector<double>>& best_series, std::size_t objective,
    const SaesConfig& cfg) {
  if (best_series.size() < static_cast<std::size_t>(cfg.stagnation_window) + 1)
    return std::nullopt;
  const std::size_t t = best_series.size() - 1;
  const std::size_t start = t - static_cast<std::size_t>(cfg.stagnation_window);
  return improvement_ratio(best_series[start][objective],
                           best_series[t][objective]);
}

inline Trend classify_trend(std::optional<double> gamma, const SaesConfig& cfg) {
  if (!gamma) return Trend::neutral;  // not enough history yet
  if (std::abs(*gamma) < cfg.stagnation_threshold) return Trend::stagnant;
  if (*gamma > cfg.fast_threshold) return Trend::fast;
  return Trend::neutral;
}

// Stagnant objectives get boosted by 1.25, fast-converging ones cut to 0.90,
// all clipped to [weight_min, weight_max].
inline void update_weights(std::vector<double>& weights,
                           const std::vector<Trend>& trends,
                           const SaesConfig& cfg) {
  for (std::size_t j = 0; j < weights.size(); ++j) {
    double w = weights[j];
    if (trends[j] == Trend::stagnant)
      w *= 1.0 + cfg.stagnation_boost;
    else if (trends[j] == Trend::fast)
      w *= 1.0 - cfg.fast_convergence_cut;
    weights[j] = std::clamp(w, cfg.weight_min, cfg.weight_max);
  }
}

// ---------------------------------------------------------------------------
// Elite archive.

// Keeps feasible, mutually non-dominated records. Dominated inserts are
// rejected, members dominated by the insert are evicted, and at capacity the
// member with the lowest crowding distance is pruned (later index on ties).
inline void archive_insert(std::vector<EvalRecord>& archive,
                           const EvalRecord& rec, const TaskSpec& spec,
                           const SaesConfig& cfg) {
  if (!rec.feasible || rec.eval_failed) return;

  const pareto::ObjectivePoint candidate = to_objective_point(rec, spec, -1);
  std::vector<pareto::ObjectivePoint> points;
  points.reserve(archive.size());
  for (std::size_t i = 0; i < archive.size(); ++i)
    points.push_back(to_objective_point(archive[i], spec, static_cast<int>(i)));

  for (const auto& p : points)
    if (pareto::dominates(p, candidate)) return;

  std::vector<EvalRecord> kept;
  kept.reserve(archive.size() + 1);
  for (std::size_t i = 0; i < archive.size(); ++i)
    if (!pareto::dominates(candidate, points[i]))
      kept.push_back(std::move(archive[i]));
  kept.push_back(rec);
  archive = std::move(kept);

  if (archive.size() > static_cast<std::size_t>(cfg.archive_capacity)) {
    std::vector<pareto::ObjectivePoint> front;
    front.reserve(archive.size());
    for (std::size_t i = 0; i < archive.size(); ++i)
      front.push_back(to_objective_point(archive[i], spec, static_cast<int>(i)));
    const std::vector<double> dist = pareto::crowding_distance(front);
    std::size_t victim = 0;
    for (std::size_t i = 1; i < archive.size(); ++i)
      if (dist[i] <= dist[victim]) victim = i;
    archive.erase(archive.begin() + static_cast<long>(victim));
  }
}

}  // namespace voxmat

#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "voxmat/generator.hpp"
#include "voxmat/rng.hpp"

namespace voxmat {

struct Nsga2Config {
  int population = 20;
  double sbx_eta = 15.0;
  double mutation_eta = 20.0;
  double crossover_prob = 0.9;
  double mutation_prob = -1.0;  // < 0 means 1/d, resolved per call
};

// Simulated binary crossover (bounded, per-coordinate) on [0, 1]^d.
// Draw order per coordinate: application gate, spread factor, swap gate.
inline std::pair<ConditioningVector, ConditioningVector> sbx_crossover(
    const ConditioningVector& p1, const ConditioningVector& p2,
    const Nsga2Config& cfg, Rng& rng) {
  constexpr double kLo = 0.0, kHi = 1.0, kEps = 1e-14;
  ConditioningVector c1 = p1, c2 = p2;
  if (rng.uniform01() > cfg.crossover_prob) return {c1, c2};

  for (std::size_t i = 0; i < p1.dim(); ++i) {
    if (rng.uniform01() > 0.5) continue;
    const double x1 = p1[i], x2 = p2[i];
    if (std::abs(x1 - x2) <= kEps) continue;
    const double y1 = std::min(x1, x2);
    const double y2 = std::max(x1, x2);
    const double u = rng.uniform01();
    const double exponent = 1.0 / (cfg.sbx_eta + 1.0);

    auto spread = [&](double beta) {
      const double alpha = 2.0 - std::pow(beta, -(cfg.sbx_eta + 1.0));
      if (u <= 1.0 / alpha) return std::pow(u * alpha, exponent);
      return std::pow(1.0 / (2.0 - u * alpha), exponent);
    };

    const double beta1 = 1.0 + 2.0 * (y1 - kLo) / (y2 - y1);
    const double beta2 = 1.0 + 2.0 * (kHi - y2) / (y2 - y1);
    double child1 = 0.5 * ((y1 + y2) - spread(beta1) * (y2 - y1));
    double child2 = 0.5 * ((y1 + y2) + spread(beta2) * (y2 - y1));
    child1 = std::clamp(child1, kLo, kHi);
    child2 = std::clamp(child2, kLo, kHi);
    if (rng.uniform01() <= 0.5) std::swap(child1, child2);
    c1[i] = child1;
    c2[i] = child2;
  }
  return {c1, c2};
}

// Bounded polynomial mutation on [0, 1]^d with per-coordinate probability
// (default 1/d). Boundary coordinates can only move inward.
inline ConditioningVector polynomial_mutation(const ConditioningVector& x,
                                              const Nsga2Config& cfg, Rng& rng) {
  constexpr double kLo = 0.0, kHi = 1.0;
  const double prob =
      cfg.mutation_prob >= 0.0 ? cfg.mutation_prob : 1.0 / static_cast<double>(x.dim());
  ConditioningVector out = x;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (rng.uniform01() > prob) continue;
    const double y = out[i];
    const double d1 = (y - kLo) / (kHi - kLo);
    const double d2 = (kHi - y) / (kHi - kLo);
    const double u = rng.uniform01();
    const double mpow = 1.0 / (cfg.mutation_eta + 1.0);
    double dq;
    if (u <= 0.5) {
      const double value =
          2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, cfg.mutation_eta + 1.0);
      dq = std::pow(value, mpow) - 1.0;
    } else {
      const double value = 2.0 * (1.0 - u) +
                           2.0 * (u - 0.5) * std::pow(1.0 - d2, cfg.mutation_eta + 1.0);
      dq = 1.0 - std::pow(value, mpow);
    }
    out[i] = std::clamp(y + dq * (kHi - kLo), kLo, kHi);
  }
  return out;
}

}  // namespace voxmat

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "voxmat/property.hpp"

namespace voxmat {
namespace fea {

enum class Preconditioner { jacobi };

struct SolverConfig {
  int max_iterations = 20000;
  double residual_tol = 1e-6;     // relative to ||b||
  double ersatz_stiffness = 1e-6; // relative void stiffness
  Preconditioner preconditioner = Preconditioner::jacobi;

  void validate() const {
    if (!(residual_tol > 0.0))
      throw std::invalid_argument("solver.residual_tol must be > 0");
    if (!(ersatz_stiffness > 0.0 && ersatz_stiffness < 1.0))
      throw std::invalid_argument("solver.ersatz_stiffness must lie in (0, 1)");
    if (max_iterations < 1)
      throw std::invalid_argument("solver.max_iterations must be >= 1");
  }
};

struct SolverError : std::runtime_error {
  SolverError(const std::string& label, int iterations, double residual)
      : std::runtime_error("solve '" + label + "' did not converge after " +
                           std::to_string(iterations) +
                           " iterations (relative residual " +
                           std::to_string(residual) + ")") {}
};

// Matrix-free preconditioned conjugate gradients. `apply` computes y = A x;
// `inv_diag` is the inverted diagonal (Jacobi). `project`, when given,
// removes the operator's nullspace component and is applied to the iterate
// and residual every iteration.
template <class Apply>
SolveStats pcg(std::size_t n, Apply&& apply, const std::vector<double>& inv_diag,
               const std::vector<double>& b, std::vector<double>& x,
               const SolverConfig& cfg,
               const std::function<void(std::vector<double>&)>& project = {},
               const std::string& label = "pcg") {
  auto dot = [n](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += u[i] * v[i];
    return s;
  };

  x.assign(n, 0.0);
  std::vector<double> r = b;
  if (project) project(r);

  const double bnorm = std::sqrt(dot(r, r));
  SolveStats stats;
  stats.label = label;
  if (bnorm == 0.0) {
    stats.iterations = 0;
    stats.final_residual = 0.0;
    stats.converged = true;
    return stats;
  }

  std::vector<double> z(n), p(n), q(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] * inv_diag[i];
  p = z;
  double rz = dot(r, z);

  double rel = 1.0;
  int iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    apply(p, q);
    const double pq = dot(p, q);
    if (pq <= 0.0) break;  // loss of positive-definiteness (nullspace drift)
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (project) {
      project(x);
      project(r);
    }
    rel = std::sqrt(dot(r, r)) / bnorm;
    if (rel <= cfg.residual_tol) {
      ++iter;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] * inv_diag[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  stats.iterations = iter;
  stats.final_residual = rel;
  stats.converged = rel <= cfg.residual_tol;
  if (!stats.converged) throw SolverError(label, iter, rel);
  return stats;
}

}  // namespace fea
}  // namespace voxmat

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "voxmat/voxel_grid.hpp"

namespace voxmat {

// Point in the continuous conditioning space driving the geometry family.
// Axis semantics: coords[0] = density level, coords[1] = anisotropy
// (axis stretch), coords[2] = cell scale.
struct ConditioningVector {
  std::vector<double> coords;

  ConditioningVector() = default;
  explicit ConditioningVector(std::vector<double> c) : coords(std::move(c)) {}
  ConditioningVector(double a, double b, double c) : coords{a, b, c} {}

  std::size_t dim() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  double& operator[](std::size_t i) { return coords[i]; }

  bool operator==(const ConditioningVector& o) const { return coords == o.coords; }
};

inline double squared_distance(const ConditioningVector& a,
                               const ConditioningVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    const double d = a.coords[i] - b.coords[i];
    s += d * d;
  }
  return s;
}

constexpr int kConditioningDim = 3;
constexpr const char* kGeneratorVersion = "gyroid-v1";

// Clamps every coordinate to [0, 1]; reports whether anything moved.
inline ConditioningVector clamp_to_unit_box(const ConditioningVector& x,
                                            bool* clamped = nullptr) {
  ConditioningVector out = x;
  bool changed = false;
  for (double& c : out.coords) {
    if (!std::isfinite(c))
      throw std::invalid_argument("conditioning vector has non-finite entry");
    const double v = std::clamp(c, 0.0, 1.0);
    if (v != c) changed = true;
    c = v;
  }
  if (clamped) *clamped = changed;
  return out;
}

namespace gyroid {

// The gyroid level-set value ranges over [-1.5, 1.5]; the margin pushes the
// threshold strictly past both extremes so coords[0] = 0 resp. 1 saturate to
// fully void resp. fully solid grids.
constexpr double kLevelLo = -1.5 - 1e-6;
constexpr double kLevelHi = 1.5 + 1e-6;
constexpr double kStretchLo = 0.75;
constexpr double kStretchHi = 1.33;
constexpr int kMaxCells = 3;

inline double threshold(double c0) { return kLevelLo + c0 * (kLevelHi - kLevelLo); }

inline double stretch(double c1) { return kStretchLo + c1 * (kStretchHi - kStretchLo); }

inline int cells_per_edge(double c2) {
  return std::min(kMaxCells, 1 + static_cast<int>(c2 * kMaxCells));
}

inline double level_set(double px, double py, double pz, double frequency,
                        double stretch_x) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double x = two_pi * frequency * stretch_x * px;
  const double y = two_pi * frequency * py;
  const double z = two_pi * frequency * pz;
  return std::sin(x) * std::cos(y) + std::sin(y) * std::cos(z) +
         std::sin(z) * std::cos(x);
}

}  // namespace gyroid

// Deterministic surrogate generator: thresholded (optionally stretched)
// gyroid sampled at voxel centers. Pure function of (x, resolution);
// out-of-range coordinates are clamped, never rejected.
inline VoxelGrid generate(const ConditioningVector& x, int resolution,
                          bool* clamped = nullptr) {
  if (x.dim() < kConditioningDim)
    throw std::invalid_argument("conditioning vector must have 3 coordinates");
  if (resolution < 4)
    throw std::invalid_argument("generator resolution must be >= 4");

  const ConditioningVector c = clamp_to_unit_box(x, clamped);
  const double tau = gyroid::threshold(c[0]);
  const double s = gyroid::stretch(c[1]);
  const int f = gyroid::cells_per_edge(c[2]);

  VoxelGrid grid(resolution);
  const double inv_n = 1.0 / resolution;
  for (int z = 0; z < resolution; ++z) {
    const double pz = (z + 0.5) * inv_n;
    for (int y = 0; y < resolution; ++y) {
      const double py = (y + 0.5) * inv_n;
      for (int xi = 0; xi < resolution; ++xi) {
        const double px = (xi + 0.5) * inv_n;
        if (gyroid::level_set(px, py, pz, f, s) <= tau)
          grid.set(xi, y, z, true);
      }
    }
  }
  return grid;
}

}  // namespace voxmat

#include <catch2/catch_amalgamated.hpp>

#include "voxmat/fea/conduction.hpp"
#include "voxmat/generator.hpp"

using namespace voxmat;
using namespace voxmat::fea;

namespace {

VoxelGrid full_grid(int n) {
  VoxelGrid g(n);
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) g.set(x, y, z, true);
  return g;
}

VoxelGrid laminate_grid(int n) {
  VoxelGrid g(n);
  for (int z = 0; z < n / 2; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) g.set(x, y, z, true);
  return g;
}

}  // namespace

TEST_CASE("solid grid conducts like the base material") {
  SolverConfig cfg;
  const ConductionResult res = conduction_homogenize(full_grid(8), 400.0, cfg);
  const Eigen::Matrix3d expected = 400.0 * Eigen::Matrix3d::Identity();
  CHECK((res.tensor.K - expected).cwiseAbs().maxCoeff() <= 1e-4 * 400.0);
  CHECK(res.tensor.k_avg == Catch::Approx(400.0).epsilon(1e-4));
}

TEST_CASE("laminate conduction hits the series and parallel means") {
  SolverConfig cfg;
  cfg.residual_tol = 1e-8;
  const double base = 10.0;
  const ConductionResult res = conduction_homogenize(laminate_grid(16), base, cfg);
  const double e = cfg.ersatz_stiffness;
  const double parallel = base * 0.5 * (1.0 + e);        // in-plane (x, y)
  const double series = base / (0.5 / 1.0 + 0.5 / e);    // through-thickness (z)
  CHECK(res.tensor.K(0, 0) == Catch::Approx(parallel).epsilon(0.02));
  CHECK(res.tensor.K(1, 1) == Catch::Approx(parallel).epsilon(0.02));
  CHECK(res.tensor.K(2, 2) == Catch::Approx(series).epsilon(0.02));
}

TEST_CASE("conduction tensor is symmetric with nonnegative diagonal") {
  SolverConfig cfg;
  const VoxelGrid grid = generate(ConditioningVector(0.5, 0.4, 0.7), 8);
  const ConductionResult res = conduction_homogenize(grid, 2.0, cfg);
  const auto& K = res.tensor.K;
  CHECK((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * K.cwiseAbs().maxCoeff());
  for (int i = 0; i < 3; ++i) CHECK(K(i, i) >= 0.0);
  CHECK(res.tensor.k_avg == Catch::Approx(K.trace() / 3.0));
}

TEST_CASE("mean conductivity sits between harmonic and arithmetic bounds") {
  SolverConfig cfg;
  for (double c0 : {0.3, 0.5, 0.8}) {
    const VoxelGrid grid = generate(ConditioningVector(c0, 0.5, 0.5), 8);
    const double vf = volume_fraction(grid);
    const ConductionResult res = conduction_homogenize(grid, 1.0, cfg);
    const double e = cfg.ersatz_stiffness;
    const double arithmetic = vf + (1.0 - vf) * e;
    const double harmonic = 1.0 / (vf / 1.0 + (1.0 - vf) / e);
    CHECK(res.tensor.k_avg <= arithmetic * (1.0 + 1e-6));
    CHECK(res.tensor.k_avg >= harmonic * (1.0 - 1e-6));
  }
}

TEST_CASE("conduction is exactly linear in the base conductivity") {
  SolverConfig cfg;
  const VoxelGrid grid = generate(ConditioningVector(0.45, 0.6, 0.3), 8);
  const ConductionResult a = conduction_homogenize(grid, 1.0, cfg);
  const ConductionResult b = conduction_homogenize(grid, 37.5, cfg);
  CHECK((b.tensor.K - 37.5 * a.tensor.K).cwiseAbs().maxCoeff() <=
        1e-12 * b.tensor.K.cwiseAbs().maxCoeff());
}

TEST_CASE("rejects a non-positive base conductivity") {
  SolverConfig cfg;
  CHECK_THROWS_AS(conduction_homogenize(full_grid(4), 0.0, cfg),
                  std::invalid_argument);
}

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "calorex/kernel_cache.hpp"
#include "calorex/nlie.hpp"
#include "calorex/thermo.hpp"

using namespace calorex;

namespace {

struct Setup {
  AnisotropyPoint point;
  SolverGrid grid;
  KernelTable kt;
};

Setup make(double delta, double t_min, const SolverConfig& cfg = {}) {
  Setup s;
  s.point = classify(delta);
  s.grid = build_grid(s.point, t_min, cfg);
  s.kt = build_kernel_table(s.point, s.grid);
  return s;
}

}  // namespace

// ------------------------------------------------------------------- grid

TEST(Grid, PeriodicDomainForEasyAxis) {
  for (double t : {0.05, 1.0, 100.0}) {
    const auto g = make(2.0, t).grid;
    EXPECT_TRUE(g.periodic());
    EXPECT_DOUBLE_EQ(g.half_width, kPi);
    EXPECT_DOUBLE_EQ(g.x(0), -kPi);
    EXPECT_NEAR(g.x(g.n_points - 1) + g.spacing, kPi, 1e-14);
    EXPECT_EQ(g.fft_size, g.n_points);
  }
}

TEST(Grid, PlaneHalfWidthBoundsDrivingTerm) {
  const double theta = kPi / 3;
  const auto g = make(0.5, 0.1).grid;
  EXPECT_FALSE(g.periodic());
  EXPECT_LT(2 * kPi * std::sin(theta) * c_plane(g.half_width, theta) / 0.1, 1e-14);
  EXPECT_EQ(g.fft_size, 2 * g.n_points);
}

TEST(Grid, PointCountIsPowerOfTwoAndAtLeastConfigured) {
  SolverConfig cfg;
  cfg.n_points = 8192;
  const auto g = make(0.5, 1.0, cfg).grid;
  EXPECT_GE(g.n_points, 8192u);
  EXPECT_TRUE(std::has_single_bit(g.n_points));
  cfg.n_points = 1000;
  EXPECT_THROW(make(0.5, 1.0, cfg), Error);
}

TEST(Grid, LowerTemperatureNeedsWiderDomain) {
  EXPECT_GT(make(0.5, 0.01).grid.half_width, make(0.5, 1.0).grid.half_width);
}

TEST(Grid, HashSeparatesShifts) {
  SolverConfig a, b;
  b.eps_shift_fraction = 0.25;
  EXPECT_NE(make(0.5, 1.0, a).grid.hash, make(0.5, 1.0, b).grid.hash);
  EXPECT_EQ(make(0.5, 1.0, a).grid.hash, make(0.5, 1.0, a).grid.hash);
}

TEST(Grid, RefusesPointsNeedingTooManyNodes) {
  SolverConfig cfg;
  cfg.max_points = 4096;
  try {
    make(1.0 - 1e-5, 0.01, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SlowConvergence);
  }
}

// ----------------------------------------------------------- kernel table

TEST(KernelTable, PlaneSamplesMatchDirectEvaluation) {
  const auto s = make(0.5, 0.5);
  const double theta = s.grid.angle;
  for (std::size_t j = s.grid.n_points / 2 - 40; j < s.grid.n_points / 2 + 40; j += 7) {
    const double x = s.grid.x(j);
    EXPECT_NEAR(s.kt.c_samples[j], c_plane(x, theta), 1e-15);
    EXPECT_NEAR(s.kt.g_samples[j], g_plane(x, theta).value, 1e-11) << x;
    const cplx gs = g_plane_shifted(x, theta, s.kt.eps, 1).value;
    EXPECT_NEAR(std::abs(s.kt.g_shift_plus[j] - gs), 0.0, 1e-11) << x;
    EXPECT_NEAR(std::abs(s.kt.drive_a[j] - c_plane(cplx(x, s.kt.drive_shift), theta)), 0.0, 1e-15);
  }
  EXPECT_NEAR(s.kt.kernel_integral, g_plane_integral(theta), 1e-15);
}

TEST(KernelTable, AxisSamplesMatchSeries) {
  const auto s = make(2.0, 0.5);
  const double phi = s.grid.angle;
  for (std::size_t j = 0; j < s.grid.n_points; j += s.grid.n_points / 16) {
    const double x = s.grid.x(j);
    EXPECT_NEAR(s.kt.c_samples[j], c_axis(x, phi), 1e-14);
    EXPECT_NEAR(s.kt.g_samples[j], g_axis(x, phi), 1e-14);
    EXPECT_NEAR(std::abs(s.kt.g_shift_plus[j] - g_axis_shifted(x, phi, s.kt.eps, 1).value), 0.0, 1e-13);
  }
}

TEST(KernelTable, RejectsForeignGrid) {
  const auto a = make(0.5, 1.0);
  EXPECT_THROW(build_kernel_table(classify(0.6), a.grid), Error);
}

// ------------------------------------------------------------ helpers

TEST(Log1pExp, ContinuousAcrossBranchLine) {
  // Im z passing pi at large Re z: ln(1 + e^z) = z + ln(1 + e^{-z}) has no jump.
  const cplx a = log1p_exp(cplx(30.0, kPi - 1e-9)), b = log1p_exp(cplx(30.0, kPi + 1e-9));
  EXPECT_NEAR(std::abs(a - b), 2e-9, 1e-12);
  for (cplx z : {cplx(-3, 0.4), cplx(0.2, -1.0), cplx(5, 2)})
    EXPECT_NEAR(std::abs(std::exp(log1p_exp(z)) - (1.0 + std::exp(z))), 0.0, 1e-12);
  EXPECT_NEAR(log1p_exp(cplx(800.0, 0.0)).real(), 800.0, 1e-12);
}

TEST(Logistic, MatchesDefinition) {
  for (cplx z : {cplx(-40, 0.1), cplx(0.3, -2.0), cplx(40, 1)}) {
    const cplx a = std::exp(z);
    EXPECT_NEAR(std::abs(logistic(z) - a / (1.0 + a)), 0.0, 1e-14);
  }
}

// ------------------------------------------------------------------ solve

TEST(Solve, XXPointIsClosedForm) {
  const auto s = make(0.0, 0.5);
  SolverConfig cfg;
  const double t = 0.5, h = 0.2;
  const auto aux = solve(s.point, ExternalConditions(t, h), s.grid, s.kt, cfg);
  EXPECT_LE(aux.iterations, 2);
  // g = 0 at Delta = 0: ln a = -pi sin(theta) c(x + i eps/2) / t + h / t
  for (std::size_t j = 0; j < s.grid.n_points; j += 97) {
    const cplx ref = -kPi * s.kt.drive_a[j] / t + h / t;
    EXPECT_NEAR(std::abs(aux.ln_a[j] - ref), 0.0, 1e-14);
  }
  EXPECT_LT(residual(aux, s.grid, s.kt), 1e-14);
}

TEST(Solve, ConvergesAndConjugatePairAtZeroField) {
  const auto s = make(0.5, 0.5);
  const auto aux = solve(s.point, ExternalConditions(0.5, 0.0), s.grid, s.kt, SolverConfig{});
  EXPECT_LT(aux.residual, 1e-12);
  for (std::size_t j = 0; j < s.grid.n_points; ++j)
    ASSERT_NEAR(std::abs(aux.ln_abar[j] - std::conj(aux.ln_a[j])), 0.0, 1e-12);
}

TEST(Solve, FieldReversalSwapsTheFunctions) {
  // The functions live on conjugate contours, so the swap is up to conjugation:
  // ln a(x; h) = conj(ln abar(x; -h)).
  const auto s = make(0.5, 0.5);
  const auto p = solve(s.point, ExternalConditions(0.5, 0.1), s.grid, s.kt, SolverConfig{});
  const auto m = solve(s.point, ExternalConditions(0.5, -0.1), s.grid, s.kt, SolverConfig{});
  double worst = 0.0;
  for (std::size_t j = 0; j < s.grid.n_points; ++j)
    worst = std::max(worst, std::abs(p.ln_a[j] - std::conj(m.ln_abar[j])));
  EXPECT_LT(worst, 1e-10);
}

TEST(Solve, FieldReversalLiteralPointwise) {
  // Literal reading: ln a(h) = ln abar(-h) with no conjugation.
  const auto s = make(0.5, 0.5);
  const auto p = solve(s.point, ExternalConditions(0.5, 0.1), s.grid, s.kt, SolverConfig{});
  const auto m = solve(s.point, ExternalConditions(0.5, -0.1), s.grid, s.kt, SolverConfig{});
  double worst = 0.0;
  for (std::size_t j = 0; j < s.grid.n_points; ++j) worst = std::max(worst, std::abs(p.ln_a[j] - m.ln_abar[j]));
  EXPECT_LT(worst, 1e-10);
}

TEST(Solve, IndependentResidualAgreesWithReported) {
  for (double delta : {0.5, 1.5}) {
    const auto s = make(delta, 0.25);
    const auto aux = solve(s.point, ExternalConditions(0.25, 0.05), s.grid, s.kt, SolverConfig{});
    EXPECT_LE(residual(aux, s.grid, s.kt), 2 * aux.residual + 1e-15);
  }
}

TEST(Solve, ResidualDetectsPerturbation) {
  const auto s = make(0.5, 0.5);
  auto aux = solve(s.point, ExternalConditions(0.5, 0.0), s.grid, s.kt, SolverConfig{});
  aux.ln_a[s.grid.n_points / 2] += 0.01;
  EXPECT_GE(residual(aux, s.grid, s.kt), 0.001);
}

TEST(Solve, WarmStartSavesIterations) {
  const auto s = make(0.5, 0.5);
  const auto cold = solve(s.point, ExternalConditions(0.5, 0.0), s.grid, s.kt, SolverConfig{});
  const auto next = solve(s.point, ExternalConditions(0.51, 0.0), s.grid, s.kt, SolverConfig{});
  const auto warm = solve(s.point, ExternalConditions(0.51, 0.0), s.grid, s.kt, SolverConfig{}, &cold);
  EXPECT_LT(warm.iterations, next.iterations);
  EXPECT_LT(std::abs(free_energy_rel(warm, s.grid, s.kt) - free_energy_rel(next, s.grid, s.kt)), 1e-12);
}

TEST(Solve, BitIdenticalReruns) {
  const auto s = make(1.5, 0.3);
  const auto a = solve(s.point, ExternalConditions(0.3, 0.1), s.grid, s.kt, SolverConfig{});
  const auto b = solve(s.point, ExternalConditions(0.3, 0.1), s.grid, s.kt, SolverConfig{});
  ASSERT_EQ(a.ln_a.size(), b.ln_a.size());
  EXPECT_EQ(std::memcmp(a.ln_a.data(), b.ln_a.data(), a.ln_a.size() * sizeof(cplx)), 0);
  EXPECT_EQ(a.residual_history, b.residual_history);
}

TEST(Solve, IterationBudgetSurfacesNonConvergence) {
  const auto s = make(0.5, 0.5);
  SolverConfig cfg;
  cfg.max_iter = 3;
  try {
    solve(s.point, ExternalConditions(0.5, 0.0), s.grid, s.kt, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergence);
    EXPECT_EQ(e.residual_history().size(), 3u);
  }
}

TEST(Solve, OverdampedMapDiverges) {
  const auto s = make(0.5, 0.5);
  SolverConfig cfg;
  cfg.damping = 2.5;
  EXPECT_THROW(solve(s.point, ExternalConditions(0.5, 0.0), s.grid, s.kt, cfg), Error);
}

TEST(Solve, RefusesCriticalPoint) {
  SolverConfig cfg;
  AnisotropyPoint p = from_deviation(-1e-9);
  const auto s = make(0.5, 1.0);
  try {
    solve(p, ExternalConditions(1.0), s.grid, s.kt, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateRegime);
    EXPECT_NE(std::string(e.what()).find("d_eps"), std::string::npos);
  }
}

TEST(Solve, RefusesMismatchedTables) {
  const auto a = make(0.5, 1.0), b = make(0.6, 1.0);
  EXPECT_THROW(solve(a.point, ExternalConditions(1.0), a.grid, b.kt, SolverConfig{}), Error);
}

// ------------------------------------------------------------ kernel cache

TEST(KernelCache, RoundTripIsExact) {
  const auto s = make(0.5, 0.5);
  const auto dir = std::filesystem::temp_directory_path() / "calorex_cache_test";
  std::filesystem::remove_all(dir);
  const KernelTable first = cached_kernel_table(s.point, s.grid, dir.string());
  const auto path = dir / kernel_cache_name(s.grid);
  ASSERT_TRUE(std::filesystem::exists(path));
  const auto loaded = load_kernel_table(path.string(), s.grid);
  ASSERT_TRUE(loaded.has_value());
  EXPECT_EQ(loaded->self_ft, s.kt.self_ft);
  EXPECT_EQ(loaded->cross_a_ft, s.kt.cross_a_ft);
  EXPECT_EQ(loaded->drive_a, s.kt.drive_a);
  EXPECT_EQ(loaded->g_shift_minus, s.kt.g_shift_minus);
  EXPECT_EQ(loaded->kernel_integral, s.kt.kernel_integral);
  EXPECT_EQ(first.g_samples, s.kt.g_samples);

  // A table for another grid is never served from this file.
  const auto other = make(0.6, 0.5);
  EXPECT_FALSE(load_kernel_table(path.string(), other.grid).has_value());

  // Truncated files are rejected.
  std::filesystem::resize_file(path, 64);
  EXPECT_FALSE(load_kernel_table(path.string(), s.grid).has_value());
  std::filesystem::remove_all(dir);
}

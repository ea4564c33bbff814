#include <gtest/gtest.h>

#include <cmath>

#include "calorex/caloric.hpp"

using namespace calorex;

namespace {

const Config kCfg;

double gamma_at(double d, double t) {
  const auto p = evaluate_point(d, t, 0.0, kCfg);
  return p.gamma_d;
}

}  // namespace

TEST(ProxyEndpoint, ReplacesOnlyNearZero) {
  EXPECT_EQ(proxy_endpoint(0.3, 0.0, 1e-3), 0.3);
  EXPECT_EQ(proxy_endpoint(0.0, 0.2, 1e-3), 1e-3);
  EXPECT_EQ(proxy_endpoint(0.0, -0.2, 1e-3), -1e-3);
  EXPECT_EQ(proxy_endpoint(5e-4, -0.2, 1e-3), -1e-3);
  EXPECT_EQ(proxy_endpoint(0.0, 0.0, 1e-3), 1e-3);
}

TEST(DeltaEntropy, ZeroAndAntisymmetric) {
  EXPECT_EQ(delta_entropy(0.1, 0.1, 0.5, kCfg), 0.0);
  const double a = delta_entropy(-0.2, 0.2, 0.5, kCfg), b = delta_entropy(0.2, -0.2, 0.5, kCfg);
  EXPECT_EQ(a, -b);
  EXPECT_NE(a, 0.0);
}

TEST(Caloric, EqualEndpointsGiveZero) {
  const auto r = delta_temperature_paper(-0.2, -0.2, 0.5, kCfg);
  EXPECT_EQ(r.delta_t_paper, 0.0);
  EXPECT_EQ(r.delta_S, 0.0);
  EXPECT_EQ(delta_temperature_isentrope(-0.2, -0.2, 0.5, kCfg), 0.0);
  EXPECT_EQ(asymptotic_caloric(0.4, 0.4, 0.1), 0.0);
}

TEST(Caloric, AsymptoticFormulas) {
  EXPECT_NEAR(asymptotic_caloric(-0.3, -0.1, 0.1), 0.1 / 0.6, 1e-15);
  EXPECT_NEAR(asymptotic_caloric(0.1, 0.4, 0.1), 0.1 / 0.9, 1e-15);
  EXPECT_NEAR(asymptotic_caloric(-0.1, 0.1, 0.1), 0.1 * std::log(2.0) / 0.2, 1e-15);
  EXPECT_EQ(excursion_side(-0.3, 0.0), ExcursionSide::Negative);
  EXPECT_EQ(excursion_side(0.2, 0.0), ExcursionSide::Positive);
  EXPECT_EQ(excursion_side(-0.1, 0.1), ExcursionSide::Crossing);
}

TEST(Caloric, RegularIntegralMatchesSimpson) {
  const double a = -0.4, b = -0.2, t = 0.5;
  const int n = 8;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * gamma_at(a + (b - a) * i / n, t);
  }
  s *= (b - a) / (3.0 * n);
  const auto r = delta_temperature_paper(a, b, t, kCfg);
  EXPECT_FALSE(r.split);
  EXPECT_NEAR(r.regular_integral, s, 1e-5 * std::abs(s) + 1e-9);
  EXPECT_NEAR(r.delta_t_paper, t * s / (b - a), 1e-5 * std::abs(t * s / (b - a)) + 1e-9);
}

TEST(Caloric, SwappedEndpointsSameTemperatureChange) {
  const auto f = delta_temperature_paper(-0.4, -0.2, 0.5, kCfg);
  const auto r = delta_temperature_paper(-0.2, -0.4, 0.5, kCfg);
  EXPECT_NEAR(f.delta_t_paper, r.delta_t_paper, 1e-10);
  EXPECT_NEAR(f.delta_S, -r.delta_S, 1e-14);
}

TEST(Isentrope, ConservesEntropy) {
  const double d1 = -0.3, d2 = -0.1, t = 0.3;
  const double dt = delta_temperature_isentrope(d1, d2, t, kCfg);
  EXPECT_NEAR(entropy_at(d2, t + dt, 0.0, kCfg), entropy_at(d1, t, 0.0, kCfg), 1e-8);
}

TEST(Isentrope, Reversible) {
  const double d1 = 0.1, d2 = 0.4, t = 0.3;
  const double fwd = delta_temperature_isentrope(d1, d2, t, kCfg);
  const double back = delta_temperature_isentrope(d2, d1, t + fwd, kCfg);
  EXPECT_NEAR(fwd + back, 0.0, 1e-6);
}

TEST(Isentrope, SmallStepFollowsGrueneisen) {
  // dS = 0  =>  dt = -t Gamma dd to first order
  const double d = -0.3, dd = 0.01, t = 0.5;
  const double dt = delta_temperature_isentrope(d - dd / 2, d + dd / 2, t, kCfg);
  const double ref = -t * gamma_at(d, t) * dd;
  EXPECT_NEAR(dt, ref, 0.02 * std::abs(ref));
}

// Closed-form low-temperature values of the temperature change.

TEST(CaloricLowT, CrossingMatchesLn2Estimate) {
  const auto r = delta_temperature_paper(-0.1, 0.1, 0.1, kCfg);
  EXPECT_TRUE(r.split);
  EXPECT_NEAR(r.delta_t_paper, 0.3466, 0.05 * 0.3466) << "jump part " << r.jump_contribution;
}

TEST(CaloricLowT, NegativeSideMatchesThirdEstimate) {
  const double t = 0.05;
  const auto r = delta_temperature_paper(-0.15, -0.05, t, kCfg);
  const double ref = asymptotic_caloric(-0.15, -0.05, t);
  EXPECT_NEAR(r.delta_t_paper, ref, 0.2 * ref);
}

TEST(CaloricLowT, QuadratureAgreesInSignWithIsentrope) {
  const double t = 0.1;
  const auto r = delta_temperature_paper(-0.3, -0.1, t, kCfg);
  const double iso = delta_temperature_isentrope(-0.3, -0.1, t, kCfg);
  EXPECT_GT(r.delta_t_paper * iso, 0.0) << "quadrature " << r.delta_t_paper << " isentrope " << iso;
}

TEST(CaloricLowT, CrossingEntropyChangeNearLowerSide) {
  const double t = 0.02, b = 0.01;
  const double dS = delta_entropy(-b, b, t, kCfg);
  const double s_minus = entropy_at(-b, t, 0.0, kCfg);
  EXPECT_NEAR(dS, s_minus, 0.25 * s_minus) << "dS " << dS;
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "calorex/config.hpp"
#include "calorex/model.hpp"

using namespace calorex;

TEST(Classify, IsotropicPointIsPlaneWithZeroAngle) {
  const auto p = classify(1.0);
  EXPECT_TRUE(p.easy_plane());
  EXPECT_EQ(p.angle(), 0.0);
  EXPECT_EQ(p.d, 0.0);
}

TEST(Classify, HalfIsThetaPiOverThree) {
  const auto p = classify(0.5);
  EXPECT_TRUE(p.easy_plane());
  EXPECT_NEAR(p.angle(), 1.047198, 1e-6);
  EXPECT_NEAR(p.angle(), std::numbers::pi / 3, 1e-15);
  EXPECT_DOUBLE_EQ(p.d, -0.5);
}

TEST(Classify, TwoIsEasyAxis) {
  const auto p = classify(2.0);
  EXPECT_EQ(p.regime_tag(), Regime::EasyAxis);
  const double phi_ref = std::log(2.0 + std::sqrt(3.0));
  EXPECT_NEAR(p.angle(), phi_ref, 1e-15);
  EXPECT_NEAR(p.angle(), 1.316958, 1e-6);
  EXPECT_NEAR(std::cosh(p.angle()), 2.0, 1e-14);
  EXPECT_DOUBLE_EQ(p.d, 1.0);
  EXPECT_NEAR(p.amplitude(), std::sqrt(3.0), 1e-14);
}

TEST(Classify, XXPointAccepted) {
  const auto p = classify(0.0);
  EXPECT_NEAR(p.angle(), std::numbers::pi / 2, 1e-15);
  EXPECT_DOUBLE_EQ(p.d, -1.0);
}

TEST(Classify, RejectsOutOfRange) {
  for (double bad : {-0.1, 3.5, std::nan("")}) {
    try {
      classify(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::OutOfSupportedRange);
    }
  }
  EXPECT_NO_THROW(classify(5.0, 6.0));
}

TEST(Deviation, RoundTrip) {
  for (double d : {-1.0, -0.5, -1e-3, 1e-3, 0.5, 1.0, 2.0}) {
    const auto p = from_deviation(d);
    EXPECT_DOUBLE_EQ(p.d, d);
    EXPECT_NEAR(p.delta, d + 1.0, 1e-15);
    EXPECT_EQ(p.easy_plane(), d <= 0.0);
  }
}

TEST(Drive, ZeroDriveLeavesDUnchanged) {
  DriveCouplings c{0.7, {0.1, 0.2, 0.3}};
  EXPECT_DOUBLE_EQ(drive_to_d(0.5, c, 0.0, {0, 0, 0}), -0.5);
}

TEST(Drive, StrainOnly) {
  DriveCouplings c{1.0, {0, 0, 0}};
  EXPECT_NEAR(drive_to_d(1.0, c, -0.3, {0, 0, 0}), 0.3, 1e-15);
}

TEST(Drive, FieldOnly) {
  DriveCouplings c{0.0, {0, 0, 0.1}};
  EXPECT_NEAR(drive_to_d(1.0, c, 0.0, {0, 0, 2.0}), -0.2, 1e-15);
}

TEST(Drive, RejectsResultOutsideRange) {
  DriveCouplings c{1.0, {0, 0, 0}};
  EXPECT_THROW(drive_to_d(1.0, c, 2.0, {0, 0, 0}), Error);
}

TEST(Couplings, SignOfJDoesNotMatter) {
  EXPECT_DOUBLE_EQ((ExchangeCouplings{-2.0, 1.0}.delta()), 0.5);
  EXPECT_DOUBLE_EQ((ExchangeCouplings{2.0, 1.0}.delta()), 0.5);
  EXPECT_THROW((ExchangeCouplings{0.0, 1.0}.delta()), Error);
}

TEST(Conditions, TemperatureMustBePositive) {
  EXPECT_THROW(ExternalConditions(0.0), Error);
  EXPECT_THROW(ExternalConditions(-1.0), Error);
  EXPECT_THROW(ExternalConditions(std::numeric_limits<double>::infinity()), Error);
  EXPECT_NO_THROW(ExternalConditions(1e-3, -0.5));
}

TEST(FerroMap, OddMapFixesZero) {
  static_assert(ferro_free_energy(0.0) == 0.0);
  EXPECT_EQ(ferro_free_energy(-1.5), 1.5);
}

TEST(Config, ParsesFlatFileWithComments) {
  const Config c = Config::from_string(
      "# solver\n"
      "nlie.tol = 1e-10\n"
      "nlie.damping=0.7   # inline\n"
      "\n"
      "thermo.richardson = false\n"
      "caloric.max_nodes = 64\n");
  EXPECT_DOUBLE_EQ(c.nlie.tol, 1e-10);
  EXPECT_DOUBLE_EQ(c.nlie.damping, 0.7);
  EXPECT_FALSE(c.thermo.richardson);
  EXPECT_EQ(c.caloric.max_nodes, 64);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(Config::from_string("nlie.bogus = 1"), Error);
  EXPECT_THROW(Config::from_string("nlie.tol = abc"), Error);
  EXPECT_THROW(Config::from_string("nlie.tol = -1"), Error);
  EXPECT_THROW(Config::from_string("nlie.max_iter = 0"), Error);
  EXPECT_THROW(Config::from_string("just a line"), Error);
  try {
    Config::from_string("nlie.bogus = 1");
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
  }
}

TEST(Config, SnapshotRoundTrips) {
  Config a;
  a.set("nlie.d_eps", "0.002");
  a.set("thermo.dd_step", "0.0005");
  a.set("nlie.kernel_cache", "/tmp/x");
  Config b;
  for (const auto& [k, v] : a.snapshot()) b.set(k, v);
  EXPECT_EQ(a.snapshot(), b.snapshot());
  EXPECT_DOUBLE_EQ(b.nlie.d_eps, 0.002);
  EXPECT_EQ(b.nlie.kernel_cache, "/tmp/x");
}

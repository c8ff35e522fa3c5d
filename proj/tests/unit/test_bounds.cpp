#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace sensched;
using sensched::testing::load_fixture;

namespace {

Matrix scalar(double v) {
  Matrix M(1, 1);
  M(0, 0) = v;
  return M;
}

SystemModel scalar_model(int id, double a, double q = 1.0) {
  return SystemModel(id, make_linear_system(scalar(a), scalar(1), scalar(q), scalar(1)));
}

BoundOptions opts(BoundMode mode, int slack) {
  BoundOptions o;
  o.mode = mode;
  o.slack = slack;
  return o;
}

}  // namespace

TEST(BoundMode, TextRoundTrip) {
  EXPECT_EQ(parse_bound_mode("literal"), BoundMode::kLiteral);
  EXPECT_EQ(parse_bound_mode("linear"), BoundMode::kLinear);
  EXPECT_EQ(to_string(BoundMode::kLinear), "linear");
  EXPECT_THROW(parse_bound_mode("affine"), ValidationError);
}

TEST(BoundLhs, MatchesExplicitMatrixPowers) {
  std::mt19937 rng(31);
  for (int k = 0; k < 40; ++k) {
    const auto m = sensched::testing::random_planar(rng, 1, 1.01, 1.8);
    for (BoundMode mode : {BoundMode::kLiteral, BoundMode::kLinear}) {
      for (long ell = 1; ell <= 6; ++ell) {
        for (long l3 = 1; l3 <= 5; ++l3) {
          const double ref = sensched::testing::direct_bound_lhs(m, ell, l3, mode);
          EXPECT_NEAR(bound_lhs(m, ell, l3, mode), ref, 1e-9 * (1.0 + std::abs(ref)));
        }
      }
    }
  }
}

TEST(BoundLhs, NondecreasingInOffDutyLength) {
  for (const char* name : {"trio_a", "trio_b"}) {
    for (const auto& m : load_fixture(name)) {
      for (BoundMode mode : {BoundMode::kLiteral, BoundMode::kLinear}) {
        for (long l3 = 1; l3 <= 5; ++l3) {
          for (long ell = 1; ell < 60; ++ell) {
            EXPECT_LE(bound_lhs(m, ell, l3, mode), bound_lhs(m, ell + 1, l3, mode));
          }
        }
      }
    }
  }
}

TEST(AllBounds, FirstFixtureDefault) {
  const auto sys = load_fixture("trio_a");
  const auto b = all_bounds(sys);
  EXPECT_EQ(b.per_sensor, (std::vector<long>{32, 17, 7}));
  EXPECT_EQ(b.options.mode, BoundMode::kLiteral);
  EXPECT_EQ(b.options.slack, 2);
}

TEST(AllBounds, FirstFixtureBothModesAgree) {
  const auto sys = load_fixture("trio_a");
  EXPECT_EQ(all_bounds(sys, opts(BoundMode::kLinear, 2)).per_sensor, (std::vector<long>{32, 17, 7}));
  EXPECT_EQ(all_bounds(sys, opts(BoundMode::kLiteral, 1)).per_sensor, (std::vector<long>{31, 16, 7}));
}

TEST(AllBounds, SecondFixtureByMode) {
  // Reference values from an independent scan over explicit covariance matrices.
  const auto sys = load_fixture("trio_b");
  EXPECT_EQ(all_bounds(sys, opts(BoundMode::kLiteral, 2)).per_sensor, (std::vector<long>{22, 44, 7}));
  EXPECT_EQ(all_bounds(sys, opts(BoundMode::kLinear, 2)).per_sensor, (std::vector<long>{21, 44, 7}));
}

TEST(AllBounds, PerSensorIsMaxOverPairs) {
  const auto sys = load_fixture("trio_b");
  const auto b = all_bounds(sys);
  for (std::size_t i = 0; i < sys.size(); ++i) {
    long m = 0;
    for (std::size_t j = 0; j < sys.size(); ++j) {
      if (j == i) continue;
      EXPECT_EQ(b.per_pair[j][i], pair_bound(sys, j, i));
      m = std::max(m, b.per_pair[j][i]);
    }
    EXPECT_EQ(b.per_sensor[i], m);
  }
}

TEST(AllBounds, IdenticalPairIsSymmetricAndFloored) {
  std::vector<SystemModel> sys{scalar_model(1, 1.3), scalar_model(2, 1.3)};
  const auto b = all_bounds(sys);
  EXPECT_EQ(b.per_pair[0][1], b.per_pair[1][0]);
  EXPECT_GE(b.per_sensor[0], 4);
  EXPECT_EQ(b.per_sensor[0], b.per_pair[1][0]);
  EXPECT_EQ(b.per_sensor[1], b.per_pair[0][1]);
  const long raw = pair_bound_raw(sys, 0, 1);
  EXPECT_EQ(b.per_sensor[0], std::max(4L, raw + 2));
}

TEST(AllBounds, FloorHoldsOnRandomInstances) {
  std::mt19937 rng(32);
  for (int k = 0; k < 30; ++k) {
    const int n = 2 + k % 3;
    std::vector<SystemModel> sys;
    for (int i = 0; i < n; ++i) sys.push_back(sensched::testing::random_scalar(rng, i + 1, 1.05, 2.5));
    const auto b = all_bounds(sys);
    for (long d : b.per_sensor) EXPECT_GE(d, 3 * n - 2);
  }
}

TEST(AllBounds, StableSensorRejected) {
  std::vector<SystemModel> sys{scalar_model(1, 0.5), scalar_model(2, 1.5)};
  EXPECT_THROW(all_bounds(sys), UnstableAssumptionViolated);
  EXPECT_THROW(pair_bound(sys, 1, 0), UnstableAssumptionViolated);
}

TEST(AllBounds, ScanCapRaises) {
  const auto sys = load_fixture("trio_a");
  BoundOptions o;
  o.scan_cap = 3;
  EXPECT_THROW(all_bounds(sys, o), BoundSearchOverflow);
}

TEST(AllBounds, ExplicitBounds) {
  const auto b = explicit_bounds({5, 6});
  EXPECT_EQ(b.per_sensor, (std::vector<long>{5, 6}));
  EXPECT_THROW(explicit_bounds({0, 3}), ValidationError);
}

TEST(Calibration, ModesMatchingFirstFixture) {
  const auto sys = load_fixture("trio_a");
  const std::vector<CalibrationCase> cases{{sys, {32, 17, 7}}};
  EXPECT_EQ(matching_bound_modes(cases, 2).size(), 2u);
  EXPECT_TRUE(matching_bound_modes(cases, 0).empty());
}

#include <gtest/gtest.h>

#include <cmath>

#include "dispersmooth/comparison.hpp"

using namespace dispersmooth;

TEST(BestRatio, RadialPowerAgainstLinearIsConstant) {
  for (double m : {1.0, 2.0, 3.0}) {
    const auto c = ComparisonCase::radial(catalog("power", {m}, 1), Smoother::power(0.5 * (m - 1.0)),
                                          catalog("power", {1.0}, 1), Smoother::identity());
    const auto cert = best_ratio(c, FrequencyBox::interval(0.01, 10.0, 2001));
    EXPECT_TRUE(cert.constant) << m;
    EXPECT_NEAR(cert.A, 1.0 / std::sqrt(m), 1e-12);
    EXPECT_NEAR(cert.A_refined, cert.A, 1e-12);
  }
}

TEST(BestRatio, EqualityCaseValidatesOnData) {
  const double m = 3.0;
  auto c = ComparisonCase::radial(catalog("power", {m}, 1), Smoother::power(0.5 * (m - 1.0)),
                                  catalog("power", {1.0}, 1), Smoother::identity());
  c.point = {0.4, 0.0, 0.0};
  auto cert = best_ratio(c, FrequencyBox::interval(0.01, 10.0, 401));
  std::vector<FreqData> data{FreqData::gaussian(1, 1.0), FreqData::gaussian(1, 0.7, {0.3, 0, 0}, {1.5, 0, 0})};
  const auto rows = validate(cert, c, data, 1e-9, 1e-6);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) EXPECT_GT(r.rhs, 0.0);
}

TEST(BestRatio, BlowUpIsReportedAsUnbounded) {
  const auto c = ComparisonCase::radial(catalog("power", {2.0}, 1), Smoother::power(-1.0),
                                        catalog("power", {1.0}, 1), Smoother::identity());
  try {
    best_ratio(c, FrequencyBox::interval(1e-14, 1.0, 101));
    FAIL() << "expected Unbounded";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unbounded);
  }
}

TEST(BestRatio, DegeneratePointsAreExcluded) {
  const auto c = ComparisonCase::along_axis(catalog("power", {2.0}, 1), Smoother::identity(),
                                            catalog("power", {2.0}, 1), Smoother::identity());
  const auto cert = best_ratio(c, FrequencyBox::interval(-1.0, 1.0, 201));
  EXPECT_GE(cert.exclusions, 1u);
  EXPECT_NEAR(cert.A, 1.0, 1e-14);
}

TEST(Converse, BumpsApproachTheSupremum) {
  Vec3 lo{1.0, 0, 0};
  Vec3 hi{2.0, 0, 0};
  const auto c = ComparisonCase::along_axis(catalog("power", {3.0}, 1), Smoother::identity(),
                                            catalog("power", {2.0}, 1), Smoother::identity(), 0,
                                            Cutoff::box(1, lo, hi));
  const auto cert = best_ratio(c, FrequencyBox::interval(0.5, 2.5, 2001));
  // sup at the left edge of supp chi, first node inside
  EXPECT_NEAR(cert.A, std::sqrt(2.0 / 3.0), 1e-3);
  EXPECT_LE(cert.A, std::sqrt(2.0 / 3.0));
  EXPECT_NEAR(cert.argsup[0], 1.0, 1.5e-3);
  const auto r = converse_check(cert, c, {0.1, 0.03, 0.01});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_LT(r[0], r[1]);
  EXPECT_LT(r[1], r[2]);
  EXPECT_LE(r[2], cert.A * (1.0 + 1e-9));
  EXPECT_GT(r[2], 0.99 * cert.A);
}

TEST(ModelEqualities, OrderChangeFactors) {
  const auto d1 = half_line_bump(1, 3.0, 0.7, 0.5, 0.5, 0.2);
  const auto d2 = half_line_bump(2, 3.0, 0.3, 0.5, 0.5);
  const auto rows = model_equalities({1.0, 2.0, 3.0}, d1, d2);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) EXPECT_LT(r.rel_error, 1e-8) << r.name << " m=" << r.m;
}

TEST(ModelEqualities, WeightedRadialFactor) {
  const auto phi = FreqData::gaussian(2, 1.0);
  const auto rows = weighted_radial_equalities({1.0, 3.0}, 0.3, phi, {0.7, 0.0, 0.0});
  for (const auto& r : rows) EXPECT_LT(r.rel_error, 1e-6) << r.m;
}

TEST(Certificate, JsonCarriesResiduals) {
  auto c = ComparisonCase::radial(catalog("power", {2.0}, 1), Smoother::power(0.5), catalog("power", {1.0}, 1),
                                  Smoother::identity());
  auto cert = best_ratio(c, FrequencyBox::interval(0.1, 5.0, 101));
  validate(cert, c, {FreqData::gaussian(1, 1.0)}, 1e-9, 1e-6);
  const auto j = cert.to_json();
  EXPECT_EQ(j["residuals"].size(), 1u);
  EXPECT_NEAR(j["A"].get<double>(), std::sqrt(0.5), 1e-12);
}

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dispersmooth/constants.hpp"

using namespace dispersmooth;

namespace {

// Power series sum_j (-1)^j (r/2)^{2j+l} / (j! Gamma(j+l+1)) in long double.
double series_j(double l, double r) {
  long double term = std::pow(0.5L * r, static_cast<long double>(l)) / std::tgamma(static_cast<long double>(l) + 1.0L);
  long double sum = term;
  const long double q = 0.25L * r * r;
  for (int j = 1; j < 400; ++j) {
    term *= -q / (static_cast<long double>(j) * (j + l));
    sum += term;
    if (std::abs(term) < 1e-22L * std::abs(sum) && j > r) break;
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST(Bessel, OrderZeroAtOrigin) { EXPECT_EQ(bessel_j(0.0, 0.0), 1.0); }

TEST(Bessel, HalfOrderClosedForm) {
  for (double r : {1.0, 2.0, 5.0}) EXPECT_NEAR(bessel_j(0.5, r), std::sqrt(2.0 / (kPi * r)) * std::sin(r), 1e-8);
}

TEST(Bessel, OrderOneAtOne) { EXPECT_NEAR(bessel_j(1.0, 1.0), 0.4400505857, 1e-10); }

TEST(Bessel, IntegralAgreesWithSeries) {
  for (double l : {0.0, 0.5, 1.0, 1.5, 2.5})
    for (double r = 0.25; r <= 20.0; r += 0.75) EXPECT_NEAR(bessel_j(l, r), series_j(l, r), 1e-8) << l << " " << r;
}

TEST(Bessel, BothQuadraturesAgreeNearTheSwitch) {
  for (double l : {0.0, 1.0, 4.5, 12.5})
    for (double r : {l + 6.0, l + 8.0, l + 12.0}) {
      const double a = detail::bessel_jacobi(l, r).value;
      const double b = detail::bessel_contour(l, r).value;
      EXPECT_NEAR(a, b, 1e-10) << l << " " << r;
    }
}

TEST(Bessel, LargeArgumentMatchesHalfOrder) {
  for (double r : {50.0, 137.0, 200.0}) EXPECT_NEAR(bessel_j(0.5, r), std::sqrt(2.0 / (kPi * r)) * std::sin(r), 1e-12);
}

TEST(Bessel, RejectsLowOrder) { EXPECT_THROW(bessel_j(-0.5, 1.0), Error); }

TEST(Simon, Values) {
  EXPECT_NEAR(simon_constant(2.0, 3), std::sqrt(kPi), 1e-15);
  EXPECT_NEAR(simon_constant(1.0, 3), 2.5066283, 1e-7);
  EXPECT_NEAR(simon_constant(2.0, 4), 1.2533141, 1e-7);
  for (int n : {3, 4, 7})
    for (double m : {0.5, 2.0, 3.0}) EXPECT_DOUBLE_EQ(simon_constant(m, n), simon_constant(1.0, n) / std::sqrt(m));
  EXPECT_THROW(simon_constant(2.0, 2), Error);
}

TEST(Walther, HomogeneousBracketIsRhoIndependent) {
  const double m = 2.0;
  const int n = 3;
  WaltherOptions opt;
  opt.k_max = 8;
  const auto r = walther_constant(Weight::homogeneous(-1.0), Smoother::power(0.5 * (m - 2.0)),
                                  catalog("power", {m}, n), n, {0.5, 1.0, 3.0}, opt);
  EXPECT_EQ(r.k_star, 0);
  EXPECT_NEAR(r.sup_bracket, 1.0 / (m * (n - 2)), 1e-4);
  for (const auto& row : r.brackets) {
    EXPECT_NEAR(row[0], r.sup_bracket, 1e-6);
    for (std::size_t k = 1; k < row.size(); ++k) {
      EXPECT_LT(row[k], row[k - 1]);
      // int J_nu^2 t^{-1} dt = 1/(2 nu)
      EXPECT_NEAR(row[k], 1.0 / (2.0 * m * (0.5 * n + k - 1.0)), 1e-4);
    }
  }
  EXPECT_NEAR(r.constant, simon_constant(m, n), 1e-4);
  EXPECT_NEAR(r.printed_constant, 27.9, 0.05);
}

TEST(Walther, ZeroSmootherGivesZero) {
  const auto r = walther_constant(Weight::homogeneous(-1.0), Smoother::from([](const Vec3&) { return 0.0; }),
                                  catalog("power", {2.0}, 3), 3, {1.0});
  EXPECT_EQ(r.constant, 0.0);
}

TEST(Walther, DivergentIntegralIsRejected) {
  // n = 2, k = 0: J_0^2 / t is not integrable at 0.
  EXPECT_THROW(walther_constant(Weight::homogeneous(-1.0), Smoother::identity(), catalog("power", {2.0}, 2), 2, {1.0}),
               Error);
  // w = 1: J^2 t is not integrable at infinity.
  EXPECT_THROW(walther_constant(Weight::constant(), Smoother::identity(), catalog("power", {2.0}, 3), 3, {1.0}), Error);
}

TEST(Constants, CsvHeader) {
  std::ostringstream os;
  write_constants_csv(os, {{"simon", "m=2,n=3", std::sqrt(kPi), "closed_form", ""}});
  EXPECT_EQ(os.str().substr(0, 36), "name,params,value,method,sup_locatio");
}

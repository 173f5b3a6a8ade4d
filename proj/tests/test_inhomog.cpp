#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dispersmooth/inhomog.hpp"

using namespace dispersmooth;

namespace {

GridSpec grid_1d(std::size_t n, std::size_t nt) { return GridSpec::make(1, 80.0, n, 0.0, 4.0, nt); }

}  // namespace

TEST(Inhom1d, ZeroForcingGivesZero) {
  ForcingSpec f = modulated_gaussian(1, 2.0, 2.0);
  f.spectrum = [](double, const Vec3&) { return Complex{}; };
  const auto r = inhom_model_1d(catalog("schrodinger", {}, 1), f, grid_1d(512, 101), {0.0});
  EXPECT_EQ(r.rows[0].lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
}

TEST(Inhom1d, SingleModeMatchesScalarDuhamel) {
  const double L = 8.0 * kPi;
  const auto g = GridSpec::make(1, L, 64, 0.0, 3.0, 3001);
  const double dxi = g.dxi(0);
  const double T = 2.0;
  const double omega = 1.3;
  ForcingSpec f;
  f.dim = 1;
  f.spectrum = [dxi, T, omega](double tau, const Vec3& xi) {
    if (std::abs(xi[0] - 1.0) > 1e-9) return Complex{};
    return Complex(kTwoPi / dxi * detail::pulse(tau, T) * std::cos(omega * tau), 0.0);
  };
  f.support_lo = {1.0, 0, 0};
  f.support_hi = {1.0, 0, 0};
  f.t_end = T;
  f.label = "single_mode";
  DuhamelOptions opt;
  opt.richardson_tol = 1e-3;
  const auto r = inhom_model_1d(catalog("schrodinger", {}, 1), f, g, {0.0, 3.0 * g.dx(0)}, opt);
  // |u(t, x)| = |int_0^min(t,T) e^{-i tau} cos(omega tau) dtau|, a'(1) = 2.
  auto mod2 = [&](double t) {
    const double s = std::min(t, T);
    const double re = quad::integrate([&](double u) { return std::cos(u) * detail::pulse(u, T) * std::cos(omega * u); }, 0.0, s).value;
    const double im = quad::integrate([&](double u) { return -std::sin(u) * detail::pulse(u, T) * std::cos(omega * u); }, 0.0, s).value;
    return re * re + im * im;
  };
  const double oracle = 2.0 * std::sqrt(quad::integrate(mod2, 0.0, 3.0, 1e-14, 1e-12).value);
  for (const auto& row : r.rows) EXPECT_NEAR(row.lhs / oracle, 1.0, 1e-6);
}

TEST(Inhom1d, RatioIsStableUnderRefinement) {
  const auto a = catalog("schrodinger", {}, 1);
  for (const auto& f : {modulated_gaussian(1, 2.0, 2.0), traveling_bump(1, 2.0, 2.0, {-2, 0, 0}, {1, 0, 0}, {0.5, 0, 0}),
                        localized_noise(1, 2.0, 2.0, 6.0)}) {
    DuhamelOptions opt;
    opt.richardson_tol = 1e-3;
    const auto g = grid_1d(512, 401);
    const auto c = inhom_model_1d(a, f, g, {-2.5, 0.0, 2.5}, opt);
    const auto d = inhom_model_1d(a, f, refined(g), {-2.5, 0.0, 2.5}, opt);
    EXPECT_GT(c.sup_ratio, 0.0) << f.label;
    EXPECT_LT(rel_diff(c.sup_ratio, d.sup_ratio), 0.1) << f.label;
    EXPECT_LT(c.rhs_edge_fraction, 1e-6) << f.label;
  }
}

TEST(Inhom1d, RejectsInhomogeneousSymbol) {
  EXPECT_THROW(inhom_model_1d(catalog("klein_gordon", {1.0}, 1), modulated_gaussian(1, 2.0, 2.0), grid_1d(512, 101), {0.0}),
               Error);
}

TEST(Inhom2d, RatioIsStableUnderRefinement) {
  const auto f = modulated_gaussian(2, 3.0, 1.0);
  const auto g = GridSpec::make(2, 48.0, 192, 0.0, 2.0, 81);
  DuhamelOptions opt;
  opt.richardson_tol = 1e-3;
  const auto c = inhom_model_2d(2.0, f, g, {0.0, 3.0}, true, opt);
  const auto d = inhom_model_2d(2.0, f, refined(g), {0.0, 3.0}, true, opt);
  EXPECT_GT(c.sup_ratio, 0.0);
  EXPECT_LT(rel_diff(c.sup_ratio, d.sup_ratio), 0.1);
  std::ostringstream os;
  c.write_csv(os);
  EXPECT_NE(os.str().find("modulated_gaussian:pos"), std::string::npos);
}

TEST(Inhom2d, ZeroForcingGivesZero) {
  ForcingSpec f = modulated_gaussian(2, 3.0, 1.0);
  f.spectrum = [](double, const Vec3&) { return Complex{}; };
  const auto r = inhom_model_2d(2.0, f, GridSpec::make(2, 48.0, 192, 0.0, 2.0, 21), {0.0});
  EXPECT_EQ(r.sup_ratio, 0.0);
}

#include <gtest/gtest.h>

#include <cmath>

#include "dispersmooth/norms.hpp"

using namespace dispersmooth;

namespace {

GridSpec time_grid(double T, std::size_t nt) { return GridSpec::make(1, 1.0, 2, -T, T, nt); }

// x e^{-x^2/2}: odd, spectrum -i sqrt(2 pi) xi e^{-xi^2/2}, vanishing at 0.
FreqData odd_gaussian() {
  return FreqData::from_spectrum(
      1, [](const Vec3& xi) { return Complex(0.0, -std::sqrt(kTwoPi) * xi[0] * std::exp(-0.5 * xi[0] * xi[0])); },
      {-9.0, 0.0, 0.0}, {9.0, 0.0, 0.0}, 9.0, "odd_gaussian");
}

}  // namespace

TEST(Window, TrapezoidWithCutEndsIsExactForLinear) {
  const auto g = time_grid(3.0, 13);
  std::vector<double> v(g.nt);
  for (std::size_t k = 0; k < g.nt; ++k) v[k] = 2.0 + g.time(k);
  // Window [-s T, s T]: integral of 2 + t is 4 s T.
  for (double s : {1.0, 0.5, 0.3, 0.125}) EXPECT_NEAR(detail::window_integral(v, g, s), 4.0 * s * 3.0, 1e-12);
}

TEST(Window, PlainModeOnFastDecay) {
  const auto g = time_grid(8.0, 1601);
  std::vector<double> v(g.nt);
  for (std::size_t k = 0; k < g.nt; ++k) v[k] = std::exp(-g.time(k) * g.time(k));
  TimeWindowPolicy p;
  p.mode = TimeWindowPolicy::Mode::Plain;
  const auto r = window_norm(v, g, p);
  EXPECT_NEAR(r.value, std::pow(kPi, 0.25), 1e-12);
  EXPECT_TRUE(r.adequate);
}

TEST(Window, AitkenRecoversAlgebraicTail) {
  // int 1/(1 + t^2) dt = pi; the window [-200, 200] misses 1%.
  const auto g = time_grid(200.0, 40001);
  std::vector<double> v(g.nt);
  for (std::size_t k = 0; k < g.nt; ++k) v[k] = 1.0 / (1.0 + g.time(k) * g.time(k));
  const auto r = window_norm(v, g, {});
  EXPECT_LT(std::abs(r.value - std::sqrt(kPi)) / std::sqrt(kPi), 1e-5);
  EXPECT_GT(std::abs(r.plain - std::sqrt(kPi)) / std::sqrt(kPi), 1e-3);
  EXPECT_TRUE(r.adequate);
}

TEST(Window, PowerTailRecoversSlowTail) {
  // int (1 + t^2)^{-0.6} dt = sqrt(pi) Gamma(0.1) / Gamma(0.6); a third of it lies beyond |t| = 400.
  const auto g = time_grid(400.0, 16001);
  std::vector<double> v(g.nt);
  for (std::size_t k = 0; k < g.nt; ++k) v[k] = std::pow(1.0 + g.time(k) * g.time(k), -0.6);
  const double exact = std::sqrt(std::sqrt(kPi) * std::tgamma(0.1) / std::tgamma(0.6));
  TimeWindowPolicy p;
  p.mode = TimeWindowPolicy::Mode::PowerTail;
  p.tail_exponent = 1.2;
  const auto r = window_norm(v, g, p);
  EXPECT_LT(std::abs(r.value - exact) / exact, 1e-4);
  EXPECT_GT(std::abs(r.plain - exact) / exact, 0.1);
  p.tail_exponent = 1.0;
  EXPECT_THROW(window_norm(v, g, p), Error);
}

TEST(Window, ShortWindowIsFlagged) {
  const auto g = time_grid(2.0, 401);
  std::vector<double> v(g.nt);
  for (std::size_t k = 0; k < g.nt; ++k) v[k] = 1.0 / (1.0 + g.time(k) * g.time(k));
  try {
    window_norm(v, g, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::WindowInadequate);
    EXPECT_GT(e.value(), 1e-3);
  }
  TimeWindowPolicy soft;
  soft.throw_on_inadequate = false;
  EXPECT_FALSE(window_norm(v, g, soft).adequate);
}

TEST(FreqSide, TransportGivesDataNorm) {
  const auto phi = FreqData::gaussian(1, 1.0, {0.3, 0.0, 0.0}, {2.0, 0.0, 0.0});
  const auto r = freq_side_norm(catalog("transport"), Smoother::identity(), phi);
  EXPECT_NEAR(r.value, std::pow(kPi, 0.25), 1e-10);
  EXPECT_TRUE(r.sign_uniform);
  EXPECT_EQ(r.offending_mass, 0.0);
}

TEST(FreqSide, FlatSymbolIsRejected) {
  SymbolSpec flat;
  flat.name = "flat";
  flat.dim = 1;
  flat.eval = [](const Vec3& xi) { return std::abs(xi[0]) < 1.0 ? 0.0 : std::pow(std::abs(xi[0]) - 1.0, 3); };
  const auto phi = FreqData::gaussian(1, 1.0);
  try {
    freq_side_norm(flat, Smoother::identity(), phi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Monotonicity);
    EXPECT_GT(e.value(), 0.5);
  }
}

TEST(FreqSide, SignChangeIsReported) {
  const auto r = freq_side_norm(catalog("schrodinger"), Smoother::identity(), odd_gaussian());
  EXPECT_FALSE(r.sign_uniform);
}

TEST(Routes, HalfLineSchrodingerAgrees) {
  // Spectrum inside (0, inf): the frequency-side integral equals the time
  // norm at every fixed x.
  const auto phi = FreqData::gaussian(1, 1.0, {0.0, 0.0, 0.0}, {10.0, 0.0, 0.0});
  const auto a = catalog("schrodinger");
  const auto fs = freq_side_norm(a, Smoother::identity(), phi);
  ASSERT_TRUE(fs.sign_uniform);
  const auto grid = GridSpec::make(1, 128.0, 4096, -2.0, 2.0, 801);
  const auto prop = make_propagator(a, phi, grid);
  for (double x : {0.0, 1.0, -2.0}) {
    const auto ts = time_side_norm(prop, Weight::constant(), Geometry::fixed(0, x));
    EXPECT_LT(rel_diff(ts.value, fs.value), 1e-6) << "x=" << x;
  }
  const auto pts = time_side_norm_points(prop, {{0.5, 0.0, 0.0}, {-0.7, 0.0, 0.0}});
  for (const auto& r : pts) EXPECT_LT(rel_diff(r.value, fs.value), 1e-6);
}

TEST(Routes, RadialIdentityOnTheLine) {
  // f = xi^2 is radial; the two-branch identity holds at every x.
  const auto phi = odd_gaussian();
  const auto a = catalog("schrodinger");
  const auto grid = GridSpec::make(1, 512.0, 8192, -20.0, 20.0, 4001);
  const auto prop = make_propagator(a, phi, grid);
  for (double x : {0.5, 1.5}) {
    const double fs =
        freq_side_norm_radial(RadialSymbol::of(a), Smoother::identity(), Cutoff::all(), phi, {x, 0.0, 0.0});
    const auto ts = time_side_norm_points(prop, {{x, 0.0, 0.0}}).front();
    EXPECT_LT(rel_diff(ts.value, fs), 1e-3) << "x=" << x;
  }
}

TEST(Radial, SphereIntegralOfGaussian) {
  // For phi^ = e^{-|xi|^2/2} and x = 0 the sphere integral is |S^{n-1}| e^{-rho^2/2}.
  for (int n : {2, 3}) {
    const auto phi = FreqData::from_spectrum(
        n, [n](const Vec3& xi) { return Complex(std::exp(-0.5 * std::pow(norm(xi, n), 2)), 0.0); },
        {-9.0, -9.0, -9.0}, {9.0, 9.0, 9.0}, 9.0);
    const double area = n == 2 ? kTwoPi : 4.0 * kPi;
    for (double rho : {0.5, 1.0, 2.0}) {
      const Complex s = detail::sphere_integral(phi, n, rho, {0.0, 0.0, 0.0}, 64);
      EXPECT_NEAR(s.real(), area * std::exp(-0.5 * rho * rho), 1e-12);
    }
    // Off-centre point in n = 3: 4 pi sin(rho r) / (rho r) e^{-rho^2/2}.
    if (n == 3) {
      const double r = 1.3;
      const Complex s = detail::sphere_integral(phi, 3, 2.0, {0.0, r, 0.0}, 64);
      EXPECT_NEAR(s.real(), 4.0 * kPi * std::sin(2.0 * r) / (2.0 * r) * std::exp(-2.0), 1e-10);
    }
  }
}

TEST(Radial, ThreeDimensionalReductionAttainsSqrtPi) {
  const auto phi3 = FreqData::gaussian(3, 1.0);
  const auto red = RadialReduction::make(phi3, catalog("schrodinger", {}, 3));
  auto grid = GridSpec::make(1, 768.0, 16384, -20.0, 20.0, 4001);
  grid.half_cell_offset = true;
  const auto prop = make_propagator(red.line_symbol, red.line_data, grid);
  const auto r = time_side_norm(prop, Weight::homogeneous(-1.0), Geometry::space_time());
  const double ratio = std::sqrt(red.measure) * r.value / red.data_norm();
  EXPECT_LT(std::abs(ratio - std::sqrt(kPi)) / std::sqrt(kPi), 1e-3);
  // Data norm against the closed form pi^{3/4}.
  EXPECT_NEAR(red.data_norm(), std::pow(kPi, 0.75), 1e-8);
}

TEST(TimeSide, FieldAndPropagatorRoutesMatch) {
  const auto phi = FreqData::gaussian(1, 1.0, {0.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
  const auto a = catalog("schrodinger");
  const auto grid = GridSpec::make(1, 128.0, 2048, -2.0, 2.0, 201);
  const auto sigma = Smoother::power(0.5);
  const auto f = evolve(a, phi, grid);
  const auto prop = make_propagator(a, phi, grid, &sigma);
  TimeWindowPolicy p;
  p.mode = TimeWindowPolicy::Mode::Plain;
  p.throw_on_inadequate = false;
  const auto w = Weight::bracket(-1.0);
  const auto r1 = time_side_norm(f, w, sigma, Geometry::space_time(), p);
  const auto r2 = time_side_norm(prop, w, Geometry::space_time(), p);
  EXPECT_LT(rel_diff(r1.value, r2.value), 1e-12);
}

TEST(TimeSide, FixedCoordinateMustBeANode) {
  const auto phi = FreqData::gaussian(1, 1.0);
  const auto grid = GridSpec::make(1, 64.0, 1024, -1.0, 1.0, 21);
  const auto prop = make_propagator(catalog("schrodinger"), phi, grid);
  try {
    time_side_norm(prop, Weight::constant(), Geometry::fixed(0, 0.01));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(MixedNorm, TransportPointwiseNorm) {
  // u = phi(x + t) on t in [-T, T]: g(x) = (int |phi(x+t)|^2 dt)^{1/2} -> ||phi|| at x = 0.
  const auto phi = FreqData::gaussian(1, 1.0, {0.0, 0.0, 0.0}, {20.0, 0.0, 0.0});
  const auto grid = GridSpec::make(1, 40.0, 2048, -12.0, 12.0, 2401);
  const auto f = evolve(catalog("transport"), phi, grid);
  const double mx = mixed_norm(f, Smoother::identity(), Weight::constant(), INFINITY);
  EXPECT_NEAR(mx, std::pow(kPi, 0.25), 1e-6);
}

TEST(Restriction, GaussianOnCircle) {
  const auto phi = FreqData::gaussian(2, 1.0);
  // phi^ = 2 pi e^{-rho^2/2}; int over the circle of radius rho with measure rho d omega.
  const double rho = 1.5;
  const double expect = std::sqrt(kTwoPi * rho) * kTwoPi * std::exp(-0.5 * rho * rho);
  EXPECT_NEAR(restriction_norm(phi, rho), expect, 1e-12);
}

TEST(Empirical, SupOverFamily) {
  std::vector<FreqData> fam;
  for (double k : {5.0, 10.0}) fam.push_back(FreqData::gaussian(1, 1.0, {0.0, 0.0, 0.0}, {k, 0.0, 0.0}));
  fam[0].label = "k5";
  fam[1].label = "k10";
  const auto a = catalog("schrodinger");
  const auto sigma = Smoother::power(0.5);
  const auto res = empirical_constant(
      a, sigma, Weight::constant(), fam, [](const FreqData&) { return GridSpec::make(1, 128.0, 4096, -2.0, 2.0, 801); },
      Geometry::fixed(0, 0.0));
  ASSERT_EQ(res.table.size(), 2u);
  // |D|^{1/2} smoothing on positive frequencies: ratio is exactly 2^{-1/2}.
  for (const auto& row : res.table) EXPECT_NEAR(row.ratio, std::sqrt(0.5), 1e-6) << row.label;
  EXPECT_NEAR(res.sup, std::sqrt(0.5), 1e-6);
}

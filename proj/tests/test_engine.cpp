#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "dispersmooth/engine.hpp"

using namespace dispersmooth;

namespace {

// Spectral coefficient of mode i recovered from a spatial slice.
std::vector<Complex> spectrum_of(std::span<const Complex> slice, const GridSpec& g) {
  std::vector<Complex> buf(slice.begin(), slice.end());
  analyze(buf, g, synthesis_factors(g));
  return buf;
}

}  // namespace

TEST(Evolve, TransportIsShift) {
  // phi(x) = exp(-x^2/2) e^{10 i x}: spectrum inside (0, inf) to 1e-16.
  const auto phi = FreqData::gaussian(1, 1.0, {0.0, 0.0, 0.0}, {10.0, 0.0, 0.0});
  ASSERT_GT(phi.support_lo[0], 0.0);
  const auto grid = GridSpec::make(1, 20.0, 512, -2.0, 2.0, 9);
  const auto u = evolve(catalog("transport"), phi, grid);
  double dev = 0.0;
  for (std::size_t k = 0; k < grid.nt; ++k) {
    const double t = grid.time(k);
    for (std::size_t i = 0; i < grid.points(); ++i) {
      const double y = grid.x(0, i) + t;
      const Complex exact = std::exp(-0.5 * y * y) * std::polar(1.0, 10.0 * y);
      dev = std::max(dev, std::abs(u.at(k, i) - exact));
    }
  }
  EXPECT_LT(dev, 1e-8);
}

TEST(Evolve, ZeroSymbolIsIdentity) {
  SymbolSpec zero;
  zero.name = "zero";
  zero.dim = 1;
  zero.eval = [](const Vec3&) { return 0.0; };
  zero.grad = [](const Vec3&) { return Vec3{0.0, 0.0, 0.0}; };
  const auto phi = FreqData::gaussian(1, 1.0, {1.0, 0.0, 0.0});
  const auto grid = GridSpec::make(1, 16.0, 256, 0.0, 5.0, 6);
  const auto u = evolve(zero, phi, grid);
  for (std::size_t k = 1; k < grid.nt; ++k)
    for (std::size_t i = 0; i < grid.points(); ++i) EXPECT_LT(std::abs(u.at(k, i) - u.at(0, i)), 1e-14);
  for (std::size_t i = 0; i < grid.points(); ++i) {
    const double y = grid.x(0, i) - 1.0;
    EXPECT_NEAR(u.at(0, i).real(), std::exp(-0.5 * y * y), 1e-12);
  }
}

TEST(Evolve, SchrodingerGaussianClosedForm) {
  // With phi^ = int e^{-ix xi} phi and u = F^{-1}[e^{it xi^2} phi^], the
  // Gaussian integral gives u = (1 - 2it)^{-1/2} exp(-x^2 / (2 (1 - 2it))).
  const auto phi = FreqData::gaussian(1, 1.0);
  const auto grid = GridSpec::make(1, 64.0, 1024, -2.0, 2.0, 17);
  const auto u = evolve(catalog("schrodinger"), phi, grid);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.nt; ++k) {
    const Complex z(1.0, -2.0 * grid.time(k));
    for (std::size_t i = 0; i < grid.points(); ++i) {
      const double x = grid.x(0, i);
      if (std::abs(x) > 4.0) continue;
      const Complex exact = std::pow(z, -0.5) * std::exp(-x * x / (2.0 * z));
      worst = std::max(worst, std::abs(u.at(k, i) - exact) / std::abs(exact));
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Evolve, UnitarityPerSlice) {
  const auto phi = FreqData::gaussian(2, 1.0, {1.0, -0.5, 0.0}, {1.0, 0.5, 0.0});
  const auto grid = GridSpec::make(2, 40.0, 512, 0.0, 0.5, 5);
  const auto u = evolve(catalog("schrodinger", {}, 2), phi, grid);
  const double n0 = phi.l2_norm();
  for (std::size_t k = 0; k < grid.nt; ++k) EXPECT_LT(std::abs(u.slice_l2(k) - n0) / n0, 1e-8);
}

TEST(Evolve, CutoffCommutes) {
  const auto phi = FreqData::gaussian(1, 1.0, {0.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
  const auto grid = GridSpec::make(1, 64.0, 1024, 0.0, 1.0, 3);
  const auto a = catalog("schrodinger");
  const auto chi = Cutoff::annulus(0.5, 2.0, 0.3);
  const auto u1 = evolve(a, phi.with_cutoff(chi), grid);
  auto u2 = evolve(a, phi, grid);
  std::vector<double> m(grid.points());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = chi(grid.freq_point(i));
  for (std::size_t k = 0; k < grid.nt; ++k) {
    apply_multiplier(u2.slice(k), grid, m);
    for (std::size_t i = 0; i < grid.points(); ++i) EXPECT_LT(std::abs(u1.at(k, i) - u2.at(k, i)), 1e-13);
  }
}

TEST(Evolve, LargerBoxAgrees) {
  const auto phi = FreqData::gaussian(1, 1.0);
  const auto a = catalog("schrodinger");
  const auto g1 = GridSpec::make(1, 40.0, 512, 0.0, 1.0, 5);
  const auto g2 = GridSpec::make(1, 80.0, 1024, 0.0, 1.0, 9);
  const auto u1 = evolve(a, phi, g1);
  const auto u2 = evolve(a, phi, g2);
  double diff = 0.0;
  for (std::size_t k = 0; k < g1.nt; ++k)
    for (std::size_t i = 0; i < g1.points(); ++i) {
      // Same physical node on the doubled box and doubled count.
      const std::size_t i2 = i + g1.n[0] / 2;
      diff = std::max(diff, std::abs(u1.at(k, i) - u2.at(2 * k, i2)));
    }
  EXPECT_LT(diff, 4e-10);
}

TEST(Evolve, UnderresolvedGridIsHardError) {
  const auto phi = FreqData::gaussian(1, 1.0);
  try {
    evolve(catalog("schrodinger"), phi, GridSpec::make(1, 64.0, 128, 0.0, 1.0, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Underresolved);
    EXPECT_LT(e.value(), 1.0);
  }
  try {
    evolve(catalog("schrodinger"), phi, GridSpec::make(1, 16.0, 1024, 0.0, 10.0, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Underresolved);
  }
}

TEST(Evolve, DeterministicAcrossWorkerCounts) {
  const auto phi = FreqData::gaussian(1, 1.0, {0.5, 0.0, 0.0}, {0.5, 0.0, 0.0});
  const auto grid = GridSpec::make(1, 64.0, 1024, -1.0, 1.0, 101);
  set_workers(1);
  const auto u1 = evolve(catalog("schrodinger"), phi, grid);
  set_workers(3);
  const auto u3 = evolve(catalog("schrodinger"), phi, grid);
  set_workers(0);
  ASSERT_EQ(u1.data.size(), u3.data.size());
  EXPECT_EQ(0, std::memcmp(u1.data.data(), u3.data.data(), u1.data.size() * sizeof(Complex)));
}

TEST(EvolveTimeDep, UnitCoefficientMatchesEvolve) {
  const auto phi = FreqData::gaussian(1, 1.0);
  const auto grid = GridSpec::make(1, 64.0, 1024, 0.0, 1.0, 11);
  const auto a = catalog("schrodinger");
  const auto u = evolve(a, phi, grid);
  const auto v = evolve_timedep(TimeCoefficient::constant(1.0), a, phi, grid);
  for (std::size_t i = 0; i < u.data.size(); ++i) EXPECT_LT(std::abs(u.data[i] - v.data[i]), 1e-11);
}

TEST(EvolveTimeDep, DoubledCoefficientDoublesTime) {
  const auto phi = FreqData::gaussian(1, 1.0);
  const auto a = catalog("schrodinger");
  const auto g1 = GridSpec::make(1, 64.0, 1024, 0.0, 0.5, 6);
  const auto g2 = GridSpec::make(1, 64.0, 1024, 0.0, 1.0, 6);
  const auto v = evolve_timedep(TimeCoefficient::constant(2.0), a, phi, g1);
  const auto u = evolve(a, phi, g2);
  for (std::size_t i = 0; i < u.data.size(); ++i) EXPECT_LT(std::abs(u.data[i] - v.data[i]), 1e-11);
}

TEST(EvolveTimeDep, PolynomialCoefficientPhase) {
  // c(t) = 1 + t^2 has C(t) = t + t^3/3; with no closed form supplied the
  // engine integrates c numerically.
  TimeCoefficient c{[](double t) { return 1.0 + t * t; }};
  const auto phi = FreqData::gaussian(1, 1.0);
  const auto grid = GridSpec::make(1, 128.0, 2048, 0.0, 2.0, 9);
  const auto u = evolve_timedep(c, catalog("schrodinger"), phi, grid);
  const auto s0 = spectrum_of(u.slice(0), grid);
  for (std::size_t k = 1; k < grid.nt; ++k) {
    const double t = grid.time(k);
    const auto sk = spectrum_of(u.slice(k), grid);
    for (std::size_t i : {1u, 7u, 20u, 80u}) {
      const double xi = grid.xi(0, i);
      const Complex expect = std::polar(1.0, (t + t * t * t / 3.0) * xi * xi);
      EXPECT_LT(std::abs(sk[i] / s0[i] - expect), 1e-8) << "t=" << t << " xi=" << xi;
    }
  }
}

TEST(EvolveTimeDep, VanishingCoefficientRejected) {
  TimeCoefficient c{[](double t) { return t - 0.5; }};
  try {
    evolve_timedep(c, catalog("schrodinger"), FreqData::gaussian(1, 1.0), GridSpec::make(1, 64.0, 1024, 0.0, 1.0, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Hypothesis);
  }
}

namespace {

ForcingSpec static_forcing(const FreqData& g) {
  ForcingSpec f;
  f.dim = g.dim;
  auto spec = g.spectrum;
  f.spectrum = [spec](double, const Vec3& xi) { return spec(xi); };
  f.support_lo = g.support_lo;
  f.support_hi = g.support_hi;
  f.spatial_radius = g.spatial_radius;
  f.t_end = 0.0;
  return f;
}

}  // namespace

TEST(Duhamel, ZeroSymbolIsLinearInTime) {
  SymbolSpec zero;
  zero.name = "zero";
  zero.dim = 1;
  zero.eval = [](const Vec3&) { return 0.0; };
  zero.grad = [](const Vec3&) { return Vec3{0.0, 0.0, 0.0}; };
  const auto g = FreqData::gaussian(1, 1.0);
  const auto grid = GridSpec::make(1, 32.0, 512, 0.0, 2.0, 21);
  const auto u = duhamel(zero, static_forcing(g), grid);
  const auto g0 = sample_spectrum(g, grid);
  for (std::size_t k = 0; k < grid.nt; ++k) {
    const auto sk = spectrum_of(u.slice(k), grid);
    const double t = grid.time(k);
    for (std::size_t i = 0; i < grid.points(); i += 17)
      EXPECT_LT(std::abs(sk[i] - Complex(0.0, -t) * g0[i]), 1e-12 * (1.0 + std::abs(g0[i])));
  }
}

TEST(Duhamel, ZeroForcingGivesZero) {
  ForcingSpec f;
  f.dim = 1;
  f.spectrum = [](double, const Vec3&) { return Complex{}; };
  f.support_lo = {-1.0, 0.0, 0.0};
  f.support_hi = {1.0, 0.0, 0.0};
  const auto u = duhamel(catalog("schrodinger"), f, GridSpec::make(1, 32.0, 256, 0.0, 1.0, 11));
  for (const auto& v : u.data) EXPECT_EQ(v, Complex{});
}

TEST(Duhamel, SingleModeClosedForm) {
  // Unit forcing at every mode: u^(t, xi) = -i (e^{ita} - 1) / (i a).
  const auto grid = GridSpec::make(1, 32.0, 256, 0.0, 2.0, 401);
  ForcingSpec f;
  f.dim = 1;
  f.spectrum = [](double, const Vec3& xi) { return std::abs(xi[0]) < 2.5 ? Complex(1.0, 0.0) : Complex{}; };
  f.support_lo = {-2.5, 0.0, 0.0};
  f.support_hi = {2.5, 0.0, 0.0};
  f.spatial_radius = 1.0;
  const auto a = catalog("schrodinger");
  DuhamelOptions opt;
  opt.check = false;  // the forcing is not spatially localized; only modes are compared
  const auto u = duhamel(a, f, grid, opt);
  for (std::size_t k : {1u, 2u, 3u, 101u, 400u}) {
    const double t = grid.time(k);
    const auto sk = spectrum_of(u.slice(k), grid);
    for (std::size_t i : {3u, 10u, 20u}) {
      const double av = a(grid.freq_point(i));
      const Complex expect = Complex(0.0, -1.0) * (std::polar(1.0, t * av) - 1.0) / Complex(0.0, av);
      EXPECT_LT(std::abs(sk[i] - expect), 1e-8) << "k=" << k << " i=" << i;
    }
  }
}

TEST(Duhamel, ResidualIsSecondOrder) {
  // i u_t + a(D) u = F, checked per mode with centred differences.
  const auto a = catalog("schrodinger");
  auto residual = [&](std::size_t nt) {
    const auto grid = GridSpec::make(1, 32.0, 256, 0.0, 1.0, nt);
    ForcingSpec f;
    f.dim = 1;
    f.spectrum = [](double tau, const Vec3& xi) {
      return std::abs(xi[0]) < 2.0 ? Complex(std::cos(3.0 * tau), std::sin(tau)) : Complex{};
    };
    f.support_lo = {-2.0, 0.0, 0.0};
    f.support_hi = {2.0, 0.0, 0.0};
    DuhamelOptions opt;
    opt.check = false;
    const auto u = duhamel(a, f, grid, opt);
    const std::size_t mode = 9;
    const double av = a(grid.freq_point(mode));
    const double dt = grid.dt();
    const std::size_t mid = (nt - 1) / 2;
    const auto sm = spectrum_of(u.slice(mid - 1), grid);
    const auto s0 = spectrum_of(u.slice(mid), grid);
    const auto sp = spectrum_of(u.slice(mid + 1), grid);
    const double t = grid.time(mid);
    const Complex ut = (sp[mode] - sm[mode]) / (2.0 * dt);
    const Complex res = Complex(0.0, 1.0) * ut + av * s0[mode] - Complex(std::cos(3.0 * t), std::sin(t));
    return std::abs(res);
  };
  const double r1 = residual(41);
  const double r2 = residual(81);
  EXPECT_LT(r2, r1 / 3.0);
}

TEST(Duhamel, RichardsonFlagsCoarseSteps) {
  ForcingSpec f;
  f.dim = 1;
  f.spectrum = [](double, const Vec3& xi) { return std::abs(xi[0]) < 6.0 ? Complex(1.0, 0.0) : Complex{}; };
  f.support_lo = {-6.0, 0.0, 0.0};
  f.support_hi = {6.0, 0.0, 0.0};
  DuhamelOptions opt;
  opt.check = false;
  try {
    duhamel(catalog("schrodinger"), f, GridSpec::make(1, 32.0, 256, 0.0, 4.0, 9), opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Quadrature);
  }
}

TEST(Export, BinaryRoundTripAndCsv) {
  const auto phi = FreqData::gaussian(1, 1.0);
  const auto u = evolve(catalog("schrodinger"), phi, GridSpec::make(1, 32.0, 512, 0.0, 0.5, 3));
  const std::string path = ::testing::TempDir() + "/field.bin";
  write_binary(u, path);
  const auto v = read_binary(path);
  EXPECT_EQ(v.grid.n[0], 512u);
  EXPECT_EQ(v.grid.nt, 3u);
  ASSERT_EQ(v.data.size(), u.data.size());
  EXPECT_EQ(0, std::memcmp(u.data.data(), v.data.data(), u.data.size() * sizeof(Complex)));
  std::remove(path.c_str());
  std::ostringstream os;
  write_csv_slice(u, 1, os);
  EXPECT_EQ(os.str().substr(0, 11), "t,x1,re,im\n");
}

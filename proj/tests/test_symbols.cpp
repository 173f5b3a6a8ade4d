#include <gtest/gtest.h>

#include <cmath>

#include "dispersmooth/rng.hpp"
#include "dispersmooth/symbols.hpp"

using namespace dispersmooth;

namespace {

std::vector<Vec3> random_points(int dim, int count, std::uint64_t stream, double lo = -3.0, double hi = 3.0) {
  RngStream rng(CounterRng(kDefaultSeed, stream));
  std::vector<Vec3> pts;
  for (int i = 0; i < count; ++i) {
    Vec3 p{0.0, 0.0, 0.0};
    for (int j = 0; j < dim; ++j) p[j] = rng.uniform(lo, hi);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST(Catalog, SchrodingerFlags) {
  const auto a = catalog("schrodinger", {}, 2);
  EXPECT_EQ(a.dim, 2);
  EXPECT_DOUBLE_EQ(a.order, 2.0);
  EXPECT_TRUE(a.flags.homogeneous);
  EXPECT_TRUE(a.flags.radial);
  EXPECT_TRUE(a.flags.elliptic);
  EXPECT_DOUBLE_EQ(a({3.0, 4.0, 0.0}), 25.0);
}

TEST(Catalog, Errors) {
  try {
    catalog("no_such_symbol");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownName);
  }
  try {
    catalog("power", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Arity);
  }
  try {
    catalog("kdv", {}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dimension);
  }
  try {
    catalog("nondisp_xy", {}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dimension);
  }
}

TEST(Catalog, NondispGradientVanishesOnAxes) {
  const auto a = catalog("nondisp_xy");
  EXPECT_EQ(a.dim, 2);
  EXPECT_EQ(a.grad_norm({1.0, 0.0, 0.0}), 0.0);
  EXPECT_EQ(a.grad_norm({0.0, 1.0, 0.0}), 0.0);
  EXPECT_GT(a.grad_norm({1.0, 1.0, 0.0}), 0.1);
}

TEST(Catalog, HomogeneityAndEuler) {
  const std::vector<std::pair<std::string, int>> entries = {
      {"schrodinger", 2}, {"wave", 3}, {"kdv", 1}, {"benjamin_ono", 1}, {"shrira1", 2},
      {"nondisp_xy", 2},  {"transport", 2}};
  for (const auto& [name, dim] : entries) {
    const auto a = catalog(name, {}, dim);
    ASSERT_TRUE(a.flags.homogeneous) << name;
    for (const auto& xi : random_points(dim, 100, 11)) {
      const Vec3 x2 = scaled(xi, 2.0);
      const double lhs = a(x2);
      const double rhs = std::pow(2.0, a.order) * a(xi);
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs))) << name;
      const double euler = dot(xi, a.gradient(xi), dim);
      EXPECT_NEAR(a.order * a(xi), euler, 1e-10 * std::max(1.0, std::abs(euler))) << name;
    }
  }
  const auto p = catalog("power", {3.0}, 2);
  for (const auto& xi : random_points(2, 100, 12)) {
    EXPECT_NEAR(p(scaled(xi, 2.0)), 8.0 * p(xi), 1e-12 * 8.0 * p(xi));
    EXPECT_NEAR(3.0 * p(xi), dot(xi, p.gradient(xi), 2), 1e-10 * p(xi) * 3.0);
  }
  const auto ne = catalog("nonelliptic_model", {3.0}, 2);
  for (const auto& xi : random_points(2, 100, 13)) {
    EXPECT_NEAR(ne(scaled(xi, 2.0)), 8.0 * ne(xi), 1e-12 * std::max(1.0, 8.0 * std::abs(ne(xi))));
    EXPECT_NEAR(3.0 * ne(xi), dot(xi, ne.gradient(xi), 2), 1e-10 * std::max(1.0, std::abs(ne(xi))));
  }
}

TEST(Catalog, RadialProfilesAgree) {
  for (const auto& name : {"schrodinger", "wave", "relativistic"}) {
    const auto a = catalog(name, {}, 3);
    ASSERT_TRUE(a.radial_profile.has_value());
    for (const auto& xi : random_points(3, 50, 21)) EXPECT_NEAR(a(xi), a.radial_profile->f(norm(xi, 3)), 1e-12);
  }
  const auto rp = catalog("radial_poly", {1.0, -2.0, 0.5}, 2);
  EXPECT_DOUBLE_EQ(rp.order, 8.0);
  for (const auto& xi : random_points(2, 50, 22)) {
    EXPECT_NEAR(rp(xi), rp.radial_profile->f(norm(xi, 2)), 1e-10 * std::max(1.0, rp(xi)));
  }
}

TEST(GradientCheck, AnalyticGradientsMatchDifferences) {
  // |xi|^2 has an exactly linear gradient.
  const auto s = catalog("schrodinger", {}, 2);
  EXPECT_LT(gradient_check(s, random_points(2, 20, 31)).max_deviation, 1e-10);
  // xi|xi| at xi = 1: a' = 2.
  const auto bo = catalog("benjamin_ono");
  EXPECT_DOUBLE_EQ(bo.gradient({1.0, 0.0, 0.0})[0], 2.0);
  EXPECT_LT(gradient_check(bo, {{1.0, 0.0, 0.0}}).max_deviation, 1e-8);
  // Relativistic at (3, 4): grad = xi / sqrt(26).
  const auto rel = catalog("relativistic", {}, 2);
  const Vec3 g = rel.gradient({3.0, 4.0, 0.0});
  EXPECT_NEAR(g[0], 3.0 / std::sqrt(26.0), 1e-15);
  EXPECT_NEAR(g[1], 4.0 / std::sqrt(26.0), 1e-15);
  const auto chk = gradient_check(rel, {{3.0, 4.0, 0.0}});
  EXPECT_LT(chk.max_deviation, 1e-8);
  EXPECT_NEAR(chk.observed_order, 2.0, 0.1);
}

TEST(GradientCheck, EveryCatalogEntry) {
  for (const auto& name : catalog_names()) {
    std::vector<double> params;
    if (name == "power") params = {2.5};
    if (name == "klein_gordon") params = {0.7};
    if (name == "nonelliptic_model") params = {3.0};
    if (name == "radial_poly") params = {1.0, 0.5};
    const auto a = catalog(name, params, 0);
    auto pts = random_points(a.dim, 25, 41, 0.3, 2.0);
    const auto chk = gradient_check(a, pts);
    EXPECT_LT(chk.max_deviation, 1e-7) << name;
    if (!chk.at_rounding_floor) {
      EXPECT_NEAR(chk.observed_order, 2.0, 0.2) << name;
    }
  }
}

TEST(GradientCheck, SingularSampleRejected) {
  const auto w = catalog("wave", {}, 2);
  try {
    gradient_check(w, {{0.0, 0.0, 0.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Singular);
  }
}

TEST(Classify, SchrodingerIsH) {
  const auto r = classify(catalog("schrodinger", {}, 2), FrequencyBox::cube(2, 2.0, 41));
  EXPECT_EQ(r.verdict, Verdict::H);
  EXPECT_FALSE(r.l_holds);
  EXPECT_EQ(r.grad_at_origin, 0.0);
  EXPECT_TRUE(r.zeros.empty());
}

TEST(Classify, KdvLowerIsL) {
  const auto r = classify(catalog("kdv_lower"), FrequencyBox::interval(-2.0, 2.0, 401));
  EXPECT_EQ(r.verdict, Verdict::L);
  EXPECT_DOUBLE_EQ(r.grad_at_origin, 1.0);
  EXPECT_DOUBLE_EQ(std::min(r.min_grad, r.grad_at_origin), 1.0);
}

TEST(Classify, ShiftedParabolaZero) {
  for (std::size_t count : {40u, 41u, 81u}) {
    const auto box = FrequencyBox::cube(2, 2.0, count);
    const auto r = classify(catalog("shifted_parabola"), box);
    EXPECT_EQ(r.verdict, Verdict::NonDispersive);
    ASSERT_EQ(r.zeros.size(), 1u);
    EXPECT_LT(std::abs(r.zeros[0][0] + 0.5), box.spacing(0));
    EXPECT_LT(std::abs(r.zeros[0][1]), box.spacing(1));
  }
}

TEST(Classify, NondispAndRelativistic) {
  EXPECT_EQ(classify(catalog("nondisp_xy"), FrequencyBox::cube(2, 2.0, 41)).verdict, Verdict::NonDispersive);
  const auto rel = classify(catalog("relativistic", {}, 2), FrequencyBox::cube(2, 4.0, 41));
  EXPECT_EQ(rel.verdict, Verdict::HL);
  EXPECT_FALSE(rel.note.empty());
}

TEST(Classify, StableUnderRefinement) {
  for (const auto& name : catalog_names()) {
    std::vector<double> params;
    if (name == "power") params = {3.0};
    if (name == "klein_gordon") params = {1.0};
    if (name == "nonelliptic_model") params = {3.0};
    if (name == "radial_poly") params = {1.0, 1.0};
    const auto a = catalog(name, params, 0);
    if (a.dim == 3) continue;  // kept cheap
    const auto box = a.dim == 1 ? FrequencyBox::interval(-2.0, 2.0, 129) : FrequencyBox::cube(2, 2.0, 33);
    const auto v1 = classify(a, box).verdict;
    const auto v2 = classify(a, box.refined()).verdict;
    const bool flip = (v1 == Verdict::H && v2 == Verdict::NonDispersive) ||
                      (v1 == Verdict::NonDispersive && v2 == Verdict::H);
    EXPECT_FALSE(flip) << name;
  }
}

TEST(Classify, DegenerateGridFlagged) {
  FrequencyBox b = FrequencyBox::interval(0.0, 0.0, 1);
  const auto r = classify(catalog("schrodinger"), b);
  EXPECT_TRUE(r.degenerate_grid);
}

TEST(Cutoffs, RangeAndCore) {
  const auto c = Cutoff::cone({0.0, 1.0, 0.0}, 0.4);
  EXPECT_DOUBLE_EQ(c({0.0, 2.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(c({1.0, 0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(c({0.0, 0.0, 0.0}), 0.0);
  const double mid = c({std::sin(0.36), std::cos(0.36), 0.0});
  EXPECT_GT(mid, 0.0);
  EXPECT_LT(mid, 1.0);
  // Homogeneous of order zero.
  EXPECT_DOUBLE_EQ(c({0.3, 1.0, 0.0}), c({3.0, 10.0, 0.0}));
  const auto a = Cutoff::annulus(1.0, 2.0, 0.25);
  EXPECT_DOUBLE_EQ(a({1.5, 0.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(a({0.5, 0.0, 0.0}), 0.0);
  const auto h = Cutoff::half_line(1.0, 0.5);
  EXPECT_DOUBLE_EQ(h({-1.0, 0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(h({0.6, 0.0, 0.0}), 1.0);
  const auto prod = Cutoff::ball(3.0) * Cutoff::half_line();
  EXPECT_DOUBLE_EQ(prod({1.0, 0.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(prod({4.0, 0.0, 0.0}), 0.0);
  for (double x = -5.0; x <= 5.0; x += 0.01) {
    const double v = (a * h)({x, 0.3, 0.0});
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Smoothers, Conventions) {
  EXPECT_EQ(Smoother::power(0.5)({0.0, 0.0, 0.0}), 0.0);
  EXPECT_TRUE(std::isinf(Smoother::power(-0.5)({0.0, 0.0, 0.0})));
  EXPECT_DOUBLE_EQ(Smoother::bracket(1.0)({0.0, 0.0, 0.0}), 1.0);
  auto a = std::make_shared<const SymbolSpec>(catalog("schrodinger", {}, 2));
  EXPECT_NEAR(Smoother::gradient_power(a, 0.5)({3.0, 4.0, 0.0}), std::sqrt(10.0), 1e-14);
  EXPECT_DOUBLE_EQ(Smoother::partial(a, 1)({3.0, -4.0, 0.0}), -8.0);
}

TEST(Weights, Conventions) {
  EXPECT_DOUBLE_EQ(Weight::bracket(-1.0)({0.0, 0.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(Weight::axis_bracket(1, -2.0)({5.0, 1.0, 0.0}), 0.5);
  try {
    Weight::homogeneous(-1.0)({0.0, 0.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Singular);
  }
}

TEST(TimeCoefficients, PrimitiveAndValidation) {
  TimeCoefficient c{[](double t) { return 1.0 + t * t; }};
  EXPECT_NEAR(c.primitive(2.0), 14.0 / 3.0, 1e-13);
  EXPECT_EQ(c.primitive(0.0), 0.0);
  EXPECT_NO_THROW(c.validate(0.0, 2.0));
  TimeCoefficient bad{[](double t) { return t - 1.0; }};
  try {
    bad.validate(0.0, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Hypothesis);
  }
}

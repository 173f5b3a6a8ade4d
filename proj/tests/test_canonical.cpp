#include <gtest/gtest.h>

#include <cmath>

#include "dispersmooth/canonical.hpp"

using namespace dispersmooth;

namespace {

// xi_0 xi_1 + xi_0^3 / (3 xi_1): homogeneous of degree 2, vanishes at e_2.
SymbolSpec tilted_model() {
  SymbolSpec s;
  s.name = "tilted_model";
  s.dim = 2;
  s.order = 2.0;
  s.eval = [](const Vec3& xi) { return xi[0] * xi[1] + xi[0] * xi[0] * xi[0] / (3.0 * xi[1]); };
  s.grad = [](const Vec3& xi) {
    return Vec3{xi[1] + xi[0] * xi[0] / xi[1], xi[0] - xi[0] * xi[0] * xi[0] / (3.0 * xi[1] * xi[1]), 0.0};
  };
  s.flags = {true, false, false};
  return s;
}

}  // namespace

TEST(Map, IdentityLeavesDataAlone) {
  const auto phi = FreqData::gaussian(2, 1.0, {0, 0, 0}, {0.5, -1.0, 0});
  const auto out = apply(CanonicalMap::identity(2), phi);
  for (const Vec3& xi : {Vec3{0.1, 0.2, 0}, Vec3{1.0, -2.0, 0}}) EXPECT_EQ(out(xi), phi(xi));
}

TEST(Map, RotationInverseAndJacobian) {
  const auto m = CanonicalMap::rotation(0.7);
  const auto c = check_map(m, FrequencyBox::cube(2, 3.0, 21));
  EXPECT_LT(c.inverse_residual, 1e-15);
  EXPECT_NEAR(c.C, 1.0, 1e-15);
  EXPECT_LT(c.jac_fd_error, 1e-8);
}

TEST(Map, ForwardThenInverseRestoresDataOnTheCone) {
  const auto plan = elliptic_reduction(catalog("schrodinger", {}, 2), 0.6);
  const auto phi = FreqData::gaussian(2, 1.0, {0, 0, 0}, {0.0, 3.0, 0});
  const auto back = apply(plan.map, apply(plan.map, phi), true);
  for (const Vec3& eta : {Vec3{0.1, 3.0, 0}, Vec3{-0.4, 2.5, 0}}) {
    const double g = plan.map.gamma_tilde(eta);
    EXPECT_NEAR(std::abs(back(eta) - g * g * phi(eta)), 0.0, 1e-12);
  }
}

TEST(Reduction, EllipticCase) {
  const auto plan = elliptic_reduction(catalog("schrodinger", {}, 2), 0.5);
  EXPECT_LT(plan.composition_residual, 1e-12);
  EXPECT_LT(plan.bounds.inverse_residual, 1e-12);
  EXPECT_LT(plan.bounds.jac_fd_error, 1e-6);
  EXPECT_TRUE(std::isfinite(plan.q_sup));
  // q = gamma (|xi| / a^{1/2})^{1/2} = gamma for |xi|^2.
  EXPECT_NEAR(plan.q_sup, 1.0, 1e-12);
  const auto j = plan.to_json();
  EXPECT_EQ(j["target_form"], "|eta_n|^m");
}

TEST(Reduction, EllipticRadialCase) {
  const auto plan = elliptic_radial_reduction(catalog("power", {3.0}, 2), 0.5);
  EXPECT_LT(plan.composition_residual, 1e-12);
  EXPECT_LT(plan.bounds.jac_fd_error, 1e-6);
}

TEST(Reduction, NonellipticCase) {
  const auto plan = nonelliptic_reduction(tilted_model(), 0.4);
  EXPECT_LT(plan.composition_residual, 1e-12);
  EXPECT_LT(plan.bounds.inverse_residual, 1e-12);
  EXPECT_LT(plan.bounds.jac_fd_error, 1e-6);
  EXPECT_GE(plan.bounds.jac_min, 1.0 - 1e-12);
}

TEST(Reduction, NonellipticHyperbolicCase) {
  const auto plan = nonelliptic_hyperbolic_reduction(tilted_model(), 0.4);
  EXPECT_LT(plan.composition_residual, 1e-12);
  EXPECT_LT(plan.bounds.jac_fd_error, 1e-6);
}

TEST(Reduction, HypothesesAreChecked) {
  // d_1 a vanishes on the axis of the cone.
  EXPECT_THROW(
      {
        try {
          nonelliptic_reduction(catalog("nondisp_xy"), 0.3);
        } catch (const Error& e) {
          EXPECT_EQ(e.kind(), ErrorKind::Hypothesis);
          throw;
        }
      },
      Error);
  // a(e_n) != 0.
  EXPECT_THROW(nonelliptic_reduction(catalog("schrodinger", {}, 2), 0.3), Error);
  // a changes sign inside the cone.
  EXPECT_THROW(elliptic_reduction(tilted_model(), 0.3), Error);
}

TEST(Apply, DomainLeakIsAnError) {
  const auto plan = elliptic_reduction(catalog("schrodinger", {}, 2), 0.5);
  const auto phi = FreqData::gaussian(2, 4.0, {0, 0, 0}, {0.0, -6.0, 0});
  EXPECT_THROW(apply(plan.map, phi), Error);
}

TEST(Egorov, PipelinesAgreeForSchrodinger) {
  const auto plan = elliptic_reduction(catalog("schrodinger", {}, 2), 0.5);
  const auto phi = FreqData::gaussian(2, 2.0, {0, 0, 0}, {0.0, 3.0, 0});
  const auto g = GridSpec::make(2, 48.0, 640, 0.0, 1.0, 2);
  const auto rep = egorov_check(plan, phi, g, {0.5, 1.0});
  ASSERT_EQ(rep.residuals.size(), 2u);
  EXPECT_LT(rep.max_residual, 1e-6);
}

TEST(OpNorm, IdentityIsAtMostOne) {
  const auto g = GridSpec::make(2, 8.0, 32, 0.0, 0.0, 1);
  const auto r = weighted_opnorm(CanonicalMap::identity(2), 0.3, g, 20);
  EXPECT_LE(r.value, 1.0 + 1e-9);
  EXPECT_GT(r.value, 0.9);
}

TEST(OpNorm, RotationIsNearlyIsometric) {
  const auto g = GridSpec::make(2, 8.0, 24, 0.0, 0.0, 1);
  const auto r = weighted_opnorm(CanonicalMap::rotation(0.6), 0.3, g, 20);
  EXPECT_NEAR(r.value, 1.0, 0.05);
  EXPECT_LT(r.drift, 0.05);
}

TEST(OpNorm, HomogeneousWeightRange) {
  const auto g = GridSpec::make(2, 8.0, 16, 0.0, 0.0, 1);
  EXPECT_THROW(weighted_opnorm(CanonicalMap::rotation(0.6), 1.2, g, 2), Error);
}

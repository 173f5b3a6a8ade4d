#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dispersmooth/engine.hpp"
#include "dispersmooth/rng.hpp"

namespace dispersmooth {

using FreqMap = std::function<Vec3(const Vec3&)>;

/// Frequency change of variables psi with cutoff gamma. When psi alters a
/// single coordinate (changed_axis >= 0) the inverse is found by a monotone
/// 1-D solve on that coordinate inside the bracket supplied by `bracket`.
struct CanonicalMap {
  std::string name;
  int dim = 1;
  FreqMap psi;
  std::function<std::optional<Vec3>(const Vec3&)> psi_inv;
  std::function<double(const Vec3&)> jac;  // |det d psi|
  Cutoff gamma = Cutoff::all();
  int changed_axis = -1;
  bool homogeneous = false;

  double gamma_tilde(const Vec3& eta) const {
    const auto xi = psi_inv(eta);
    return xi ? gamma(*xi) : 0.0;
  }

  static CanonicalMap identity(int dim, Cutoff gamma = Cutoff::all()) {
    CanonicalMap m;
    m.name = "identity";
    m.dim = dim;
    m.psi = [](const Vec3& xi) { return xi; };
    m.psi_inv = [](const Vec3& eta) { return std::optional<Vec3>(eta); };
    m.jac = [](const Vec3&) { return 1.0; };
    m.gamma = std::move(gamma);
    m.homogeneous = true;
    return m;
  }

  /// psi(xi) = R xi for the planar rotation by `angle`.
  static CanonicalMap rotation(double angle) {
    CanonicalMap m;
    m.name = "rotation";
    m.dim = 2;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    m.psi = [c, s](const Vec3& xi) { return Vec3{c * xi[0] - s * xi[1], s * xi[0] + c * xi[1], 0.0}; };
    m.psi_inv = [c, s](const Vec3& eta) {
      return std::optional<Vec3>(Vec3{c * eta[0] + s * eta[1], -s * eta[0] + c * eta[1], 0.0});
    };
    m.jac = [](const Vec3&) { return 1.0; };
    m.gamma = Cutoff::all();
    m.homogeneous = true;
    return m;
  }

  /// psi replaces coordinate `axis` by v(xi). dv = d v / d xi_axis gives the
  /// Jacobian determinant (the map is triangular). bracket(eta) returns the
  /// interval of xi_axis values inside the cone for the other coordinates.
  static CanonicalMap single_axis(std::string name, int dim, int axis, std::function<double(const Vec3&)> v,
                                  std::function<double(const Vec3&)> dv,
                                  std::function<std::optional<std::pair<double, double>>(const Vec3&)> bracket,
                                  Cutoff gamma, bool homogeneous) {
    CanonicalMap m;
    m.name = std::move(name);
    m.dim = dim;
    m.changed_axis = axis;
    m.homogeneous = homogeneous;
    m.gamma = std::move(gamma);
    m.psi = [v, axis](const Vec3& xi) {
      Vec3 eta = xi;
      eta[axis] = v(xi);
      return eta;
    };
    m.jac = [dv](const Vec3& xi) { return std::abs(dv(xi)); };
    m.psi_inv = [v, axis, bracket](const Vec3& eta) -> std::optional<Vec3> {
      const auto br = bracket(eta);
      if (!br) return std::nullopt;
      Vec3 xi = eta;
      auto g = [&](double s) {
        xi[axis] = s;
        return v(xi) - eta[axis];
      };
      double lo = br->first;
      double hi = br->second;
      double glo = g(lo);
      double ghi = g(hi);
      if (!std::isfinite(glo) || !std::isfinite(ghi)) return std::nullopt;
      if (glo == 0.0) hi = lo;
      else if (ghi == 0.0) lo = hi;
      else if ((glo > 0.0) == (ghi > 0.0)) return std::nullopt;
      for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max({1.0, std::abs(lo), std::abs(hi)}); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((gm > 0.0) == (glo > 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      xi[axis] = 0.5 * (lo + hi);
      return xi;
    };
    return m;
  }
};

struct MapCheck {
  double jac_min = std::numeric_limits<double>::infinity();
  double jac_max = 0.0;
  double C = 0.0;                 // smallest C with 1/C <= jac <= C on the samples
  double inverse_residual = 0.0;  // max |psi_inv(psi(xi)) - xi| / (1 + |xi|)
  double jac_fd_error = 0.0;      // max relative error against a finite-difference determinant
  std::size_t samples = 0;
};

namespace detail {

inline double fd_det(const FreqMap& psi, int dim, const Vec3& xi) {
  double J[3][3] = {};
  const double h = 1e-5 * (1.0 + norm(xi, dim));
  for (int j = 0; j < dim; ++j) {
    Vec3 p = xi;
    Vec3 m = xi;
    p[j] += h;
    m[j] -= h;
    const Vec3 a = psi(p);
    const Vec3 b = psi(m);
    for (int i = 0; i < dim; ++i) J[i][j] = (a[i] - b[i]) / (2.0 * h);
  }
  if (dim == 1) return J[0][0];
  if (dim == 2) return J[0][0] * J[1][1] - J[0][1] * J[1][0];
  return J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) - J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
         J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
}

// Nodes of a box where gamma > 0.
inline std::vector<Vec3> support_samples(const Cutoff& gamma, const FrequencyBox& box) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Vec3 xi = box.node(i);
    if (norm(xi, box.dim) == 0.0) continue;
    if (gamma(xi) > 0.0) out.push_back(xi);
  }
  return out;
}

}  // namespace detail

inline MapCheck check_map(const CanonicalMap& m, const FrequencyBox& box) {
  MapCheck c;
  for (const auto& xi : detail::support_samples(m.gamma, box)) {
    ++c.samples;
    const double j = m.jac(xi);
    c.jac_min = std::min(c.jac_min, j);
    c.jac_max = std::max(c.jac_max, j);
    const auto back = m.psi_inv(m.psi(xi));
    double r = std::numeric_limits<double>::infinity();
    if (back) {
      Vec3 d{0.0, 0.0, 0.0};
      for (int k = 0; k < m.dim; ++k) d[k] = (*back)[k] - xi[k];
      r = norm(d, m.dim) / (1.0 + norm(xi, m.dim));
    }
    c.inverse_residual = std::max(c.inverse_residual, r);
    const double fd = std::abs(detail::fd_det(m.psi, m.dim, xi));
    c.jac_fd_error = std::max(c.jac_fd_error, std::abs(fd - j) / std::max(j, 1e-300));
  }
  if (c.samples == 0) throw Error(ErrorKind::InvalidArgument, "no sample inside supp gamma");
  c.C = std::max(c.jac_max, 1.0 / c.jac_min);
  return c;
}

namespace detail {

inline std::pair<Vec3, Vec3> bounding_box(const std::vector<Vec3>& pts, int dim, double pad) {
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{0.0, 0.0, 0.0};
  for (int j = 0; j < dim; ++j) {
    lo[j] = std::numeric_limits<double>::infinity();
    hi[j] = -std::numeric_limits<double>::infinity();
  }
  for (const auto& p : pts)
    for (int j = 0; j < dim; ++j) {
      lo[j] = std::min(lo[j], p[j]);
      hi[j] = std::max(hi[j], p[j]);
    }
  for (int j = 0; j < dim; ++j) {
    lo[j] -= pad;
    hi[j] += pad;
  }
  return {lo, hi};
}

}  // namespace detail

/// I_{psi,gamma} phi (spectrum gamma(xi) phi^(psi(xi))) or, with inverse set,
/// I^{-1} phi (spectrum gamma~(eta) phi^(psi^{-1}(eta))). Composition of
/// closures; no interpolation.
inline FreqData apply(const CanonicalMap& m, const FreqData& phi, bool inverse = false) {
  if (phi.dim != m.dim) throw Error(ErrorKind::Dimension, "map and data dimensions differ");
  FreqData out = phi;
  auto base = phi.spectrum;
  // Support box: image of a sample cloud of the data box.
  FrequencyBox cloud;
  cloud.dim = phi.dim;
  const std::size_t per = phi.dim == 1 ? 4097 : (phi.dim == 2 ? 129 : 33);
  for (int j = 0; j < kMaxDim; ++j) {
    cloud.lo[j] = phi.support_lo[j];
    cloud.hi[j] = phi.support_hi[j];
    cloud.count[j] = j < phi.dim ? per : 1;
  }
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3 eta = cloud.node(i);
    if (!inverse) {
      const auto xi = m.psi_inv(eta);
      if (xi && m.gamma(*xi) > 0.0) pts.push_back(*xi);
    } else {
      if (m.gamma(eta) > 0.0) pts.push_back(m.psi(eta));
    }
  }
  if (pts.empty()) throw Error(ErrorKind::DomainLeak, "data support does not meet the map's domain");
  double pad = 0.0;
  for (int j = 0; j < phi.dim; ++j) pad = std::max(pad, cloud.spacing(j));
  const auto [lo, hi] = detail::bounding_box(pts, phi.dim, 2.0 * pad);
  out.support_lo = lo;
  out.support_hi = hi;
  if (!inverse) {
    const auto gamma = m.gamma;
    const auto psi = m.psi;
    const int dim = m.dim;
    out.spectrum = [base, gamma, psi, dim](const Vec3& xi) {
      const double g = gamma(xi);
      if (g == 0.0) return Complex{};
      const Vec3 eta = psi(xi);
      for (int j = 0; j < dim; ++j)
        if (!std::isfinite(eta[j])) throw Error(ErrorKind::DomainLeak, "psi undefined where gamma != 0");
      return g * base(eta);
    };
    out.label = phi.label + ":I";
  } else {
    const auto gamma = m.gamma;
    const auto inv = m.psi_inv;
    out.spectrum = [base, gamma, inv](const Vec3& eta) {
      const auto xi = inv(eta);
      if (!xi) return Complex{};
      const double g = gamma(*xi);
      return g == 0.0 ? Complex{} : g * base(*xi);
    };
    out.label = phi.label + ":Iinv";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reductions to normal forms

struct ReductionPlan {
  std::string target_form;
  SymbolSpec source;
  SymbolSpec target;
  CanonicalMap map;
  Smoother rho;   // smoother of the normal-form estimate
  Smoother zeta;  // smoother transferred to the source
  Vec3 cone_direction{0.0, 0.0, 1.0};
  double half_angle = 0.0;
  MapCheck bounds;
  double composition_residual = 0.0;  // max |a - sigma o psi| / (1 + |a|) on supp gamma
  double q_sup = 0.0;                 // sup gamma zeta / (rho o psi)

  nlohmann::json to_json() const {
    return {{"target_form", target_form},
            {"source", source.name},
            {"cone", {{"direction", {cone_direction[0], cone_direction[1], cone_direction[2]}}, {"half_angle", half_angle}}},
            {"jacobian_bounds", {bounds.jac_min, bounds.jac_max}},
            {"C", bounds.C},
            {"q_sup", q_sup},
            {"residuals", {{"composition", composition_residual}, {"inverse", bounds.inverse_residual},
                           {"jacobian_fd", bounds.jac_fd_error}}}};
  }
};

namespace detail {

inline FrequencyBox cone_box(int dim, double radius, std::size_t per) {
  FrequencyBox b = FrequencyBox::cube(dim, radius, per);
  return b;
}

// Unit vectors in the cone around e_{n-1} up to the given angle.
inline std::vector<Vec3> cone_directions(int dim, double half_angle, int rings = 24) {
  std::vector<Vec3> out;
  const int last = dim - 1;
  for (int i = 0; i <= rings; ++i) {
    const double th = half_angle * i / rings;
    if (dim == 2) {
      for (double s : {-1.0, 1.0}) {
        Vec3 v{0.0, 0.0, 0.0};
        v[0] = s * std::sin(th);
        v[last] = std::cos(th);
        out.push_back(v);
      }
    } else {
      for (int k = 0; k < 4 * rings; ++k) {
        const double ph = kTwoPi * k / (4 * rings);
        out.push_back({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
      }
    }
  }
  return out;
}

inline void finish_plan(ReductionPlan& p, double radius) {
  const int n = p.source.dim;
  const auto box = FrequencyBox::cube(n, radius, n == 2 ? 161 : 41);
  p.bounds = check_map(p.map, box);
  double res = 0.0;
  double q = 0.0;
  for (const auto& xi : support_samples(p.map.gamma, box)) {
    const double a = p.source(xi);
    const double b = p.target(p.map.psi(xi));
    res = std::max(res, std::abs(a - b) / (1.0 + std::abs(a)));
    const double r = p.rho(p.map.psi(xi));
    const double z = p.zeta(xi);
    if (r > 0.0) q = std::max(q, p.map.gamma(xi) * z / r);
    else if (z > 0.0) q = std::numeric_limits<double>::infinity();
  }
  p.composition_residual = res;
  p.q_sup = q;
}

inline SymbolSpec normal_form_elliptic(int n, double m) {
  SymbolSpec s;
  s.name = "normal_elliptic";
  s.dim = n;
  s.order = m;
  const int last = n - 1;
  s.eval = [m, last](const Vec3& eta) { return std::pow(std::abs(eta[last]), m); };
  s.grad = [m, last](const Vec3& eta) {
    Vec3 g{0.0, 0.0, 0.0};
    const double e = std::abs(eta[last]);
    g[last] = e == 0.0 ? 0.0 : m * std::pow(e, m - 1.0) * (eta[last] > 0.0 ? 1.0 : -1.0);
    return g;
  };
  s.flags = {true, false, false};
  return s;
}

inline SymbolSpec normal_form_nonelliptic(int n, double m) {
  auto s = catalog("nonelliptic_model", {m}, n);
  s.name = "normal_nonelliptic";
  return s;
}

}  // namespace detail

/// Case (i): a > 0 and d_n a != 0 on the cone around e_n;
/// psi(xi) = (xi', a(xi)^{1/m}), sigma(eta) = |eta_n|^m.
inline ReductionPlan elliptic_reduction(const SymbolSpec& a, double half_angle, double taper = 0.2) {
  const int n = a.dim;
  if (n < 2) throw Error(ErrorKind::Dimension, "elliptic_reduction needs n >= 2");
  const double m = a.order;
  const int last = n - 1;
  for (const auto& w : detail::cone_directions(n, half_angle)) {
    const double av = a(w);
    const double d = a.partial(last, w);
    if (!(av > 1e-8) || !(std::abs(d) > 1e-8))
      throw Error(ErrorKind::Hypothesis, "a > 0 and d_n a != 0 fail on the cone", std::min(av, std::abs(d)));
  }
  Vec3 dir{0.0, 0.0, 0.0};
  dir[last] = 1.0;
  const double tan_a = half_angle < kPi / 2 ? std::tan(half_angle) : std::numeric_limits<double>::infinity();
  auto v = [a, m](const Vec3& xi) {
    const double av = a(xi);
    return av >= 0.0 ? std::pow(av, 1.0 / m) : std::numeric_limits<double>::quiet_NaN();
  };
  auto dv = [a, m, last](const Vec3& xi) {
    const double av = a(xi);
    return std::pow(av, 1.0 / m - 1.0) * a.partial(last, xi) / m;
  };
  auto bracket = [last, tan_a, v](const Vec3& eta) -> std::optional<std::pair<double, double>> {
    if (!(eta[last] > 0.0)) return std::nullopt;
    double rest = 0.0;
    for (int j = 0; j < last; ++j) rest += eta[j] * eta[j];
    rest = std::sqrt(rest);
    const double lo = std::max((1.0 - 1e-6) * rest / tan_a, 1e-300);
    double hi = std::max(2.0 * lo, eta[last]);
    Vec3 x = eta;
    for (int it = 0; it < 200; ++it) {
      x[last] = hi;
      if (v(x) >= eta[last]) return std::make_pair(lo, hi);
      hi *= 2.0;
    }
    return std::nullopt;
  };
  ReductionPlan p;
  p.target_form = "|eta_n|^m";
  p.source = a;
  p.target = detail::normal_form_elliptic(n, m);
  p.map = CanonicalMap::single_axis("elliptic", n, last, v, dv, bracket, Cutoff::cone(dir, half_angle, taper),
                                    a.flags.homogeneous);
  p.rho = Smoother::from([m, last](const Vec3& eta) { return std::pow(std::abs(eta[last]), 0.5 * (m - 1.0)); });
  p.zeta = Smoother::power(0.5 * (m - 1.0));
  p.cone_direction = dir;
  p.half_angle = half_angle;
  detail::finish_plan(p, 4.0);
  return p;
}

/// Elliptic case with the radial normal form: psi(xi) = (xi', (a^{2/m} - |xi'|^2)^{1/2}),
/// sigma(eta) = |eta|^m.
inline ReductionPlan elliptic_radial_reduction(const SymbolSpec& a, double half_angle, double taper = 0.2) {
  const int n = a.dim;
  if (n < 2) throw Error(ErrorKind::Dimension, "elliptic_radial_reduction needs n >= 2");
  const double m = a.order;
  const int last = n - 1;
  for (const auto& w : detail::cone_directions(n, half_angle)) {
    double rest = 0.0;
    for (int j = 0; j < last; ++j) rest += w[j] * w[j];
    const double av = a(w);
    if (!(av > 0.0) || !(std::pow(av, 2.0 / m) - rest > 1e-8) || !(std::abs(a.partial(last, w)) > 1e-8))
      throw Error(ErrorKind::Hypothesis, "radial elliptic reduction hypotheses fail on the cone");
  }
  Vec3 dir{0.0, 0.0, 0.0};
  dir[last] = 1.0;
  const double tan_a = std::tan(half_angle);
  auto v = [a, m, last](const Vec3& xi) {
    double rest = 0.0;
    for (int j = 0; j < last; ++j) rest += xi[j] * xi[j];
    const double av = a(xi);
    const double s = av > 0.0 ? std::pow(av, 2.0 / m) - rest : -1.0;
    return s >= 0.0 ? std::sqrt(s) : std::numeric_limits<double>::quiet_NaN();
  };
  auto dv = [a, m, last, v](const Vec3& xi) {
    return std::pow(a(xi), 2.0 / m - 1.0) * a.partial(last, xi) / (m * v(xi));
  };
  auto bracket = [last, tan_a, v](const Vec3& eta) -> std::optional<std::pair<double, double>> {
    if (!(eta[last] > 0.0)) return std::nullopt;
    double rest = 0.0;
    for (int j = 0; j < last; ++j) rest += eta[j] * eta[j];
    const double lo = std::max((1.0 - 1e-6) * std::sqrt(rest) / tan_a, 1e-300);
    double hi = std::max(2.0 * lo, eta[last]);
    Vec3 x = eta;
    for (int it = 0; it < 200; ++it) {
      x[last] = hi;
      if (v(x) >= eta[last]) return std::make_pair(lo, hi);
      hi *= 2.0;
    }
    return std::nullopt;
  };
  ReductionPlan p;
  p.target_form = "|eta|^m";
  p.source = a;
  p.target = catalog("power", {m}, n);
  p.map = CanonicalMap::single_axis("elliptic_radial", n, last, v, dv, bracket, Cutoff::cone(dir, half_angle, taper),
                                    a.flags.homogeneous);
  p.rho = Smoother::power(0.5 * (m - 1.0));
  p.zeta = Smoother::power(0.5 * (m - 1.0));
  p.cone_direction = dir;
  p.half_angle = half_angle;
  detail::finish_plan(p, 4.0);
  return p;
}

namespace detail {

// xi_1 range inside the cone around e_n for fixed (xi_2, ..., xi_n).
inline std::optional<std::pair<double, double>> first_axis_bracket(const Vec3& eta, int n, double tan_a) {
  const int last = n - 1;
  if (!(eta[last] > 0.0)) return std::nullopt;
  double mid = 0.0;
  for (int j = 1; j < last; ++j) mid += eta[j] * eta[j];
  const double s2 = tan_a * tan_a * eta[last] * eta[last] - mid;
  if (s2 <= 0.0) return std::nullopt;
  const double s = (1.0 + 1e-6) * std::sqrt(s2);
  return std::make_pair(-s, s);
}

inline void check_case_ii(const SymbolSpec& a, double half_angle) {
  const int n = a.dim;
  Vec3 en{0.0, 0.0, 0.0};
  en[n - 1] = 1.0;
  double scale = 0.0;
  for (const auto& w : cone_directions(n, half_angle)) scale = std::max(scale, std::abs(a.partial(0, w)));
  for (const auto& w : cone_directions(n, half_angle))
    if (!(std::abs(a.partial(0, w)) > 1e-8 * std::max(scale, 1.0)))
      throw Error(ErrorKind::Hypothesis, "d_1 a vanishes on the cone");
  if (std::abs(a(en)) > 1e-9 * std::max(scale, 1.0))
    throw Error(ErrorKind::Hypothesis, "case (ii) needs a(e_n) = 0", a(en));
}

}  // namespace detail

/// Case (ii): d_1 a != 0 on the cone and a(e_n) = 0;
/// psi(xi) = (a(xi)|xi_n|^{1-m}, xi_2, ..., xi_n), sigma(eta) = eta_1 |eta_n|^{m-1}.
inline ReductionPlan nonelliptic_reduction(const SymbolSpec& a, double half_angle, double taper = 0.2) {
  const int n = a.dim;
  if (n < 2) throw Error(ErrorKind::Dimension, "nonelliptic_reduction needs n >= 2");
  detail::check_case_ii(a, half_angle);
  const double m = a.order;
  const int last = n - 1;
  Vec3 dir{0.0, 0.0, 0.0};
  dir[last] = 1.0;
  const double tan_a = std::tan(half_angle);
  auto v = [a, m, last](const Vec3& xi) { return a(xi) * std::pow(std::abs(xi[last]), 1.0 - m); };
  auto dv = [a, m, last](const Vec3& xi) { return a.partial(0, xi) * std::pow(std::abs(xi[last]), 1.0 - m); };
  auto bracket = [n, tan_a](const Vec3& eta) { return detail::first_axis_bracket(eta, n, tan_a); };
  ReductionPlan p;
  p.target_form = "eta_1 |eta_n|^{m-1}";
  p.source = a;
  p.target = detail::normal_form_nonelliptic(n, m);
  p.map = CanonicalMap::single_axis("nonelliptic", n, 0, v, dv, bracket, Cutoff::cone(dir, half_angle, taper),
                                    a.flags.homogeneous);
  p.rho = Smoother::from([m, last](const Vec3& eta) { return std::pow(std::abs(eta[last]), 0.5 * (m - 1.0)); });
  p.zeta = Smoother::power(0.5 * (m - 1.0));
  p.cone_direction = dir;
  p.half_angle = half_angle;
  detail::finish_plan(p, 4.0);
  return p;
}

/// Case (ii) with the hyperbolic normal form:
/// psi(xi) = ((a + |xi'|^m)^{1/m}, xi_2, ..., xi_n), sigma(eta) = |eta_1|^m - |eta'|^m,
/// with xi' = (xi_2, ..., xi_n).
inline ReductionPlan nonelliptic_hyperbolic_reduction(const SymbolSpec& a, double half_angle, double taper = 0.2) {
  const int n = a.dim;
  if (n < 2) throw Error(ErrorKind::Dimension, "nonelliptic_hyperbolic_reduction needs n >= 2");
  detail::check_case_ii(a, half_angle);
  const double m = a.order;
  const int last = n - 1;
  Vec3 dir{0.0, 0.0, 0.0};
  dir[last] = 1.0;
  const double tan_a = std::tan(half_angle);
  auto rest_m = [m, n](const Vec3& xi) {
    double r = 0.0;
    for (int j = 1; j < n; ++j) r += xi[j] * xi[j];
    return std::pow(r, 0.5 * m);
  };
  auto v = [a, m, rest_m](const Vec3& xi) {
    const double s = a(xi) + rest_m(xi);
    return s > 0.0 ? std::pow(s, 1.0 / m) : std::numeric_limits<double>::quiet_NaN();
  };
  auto dv = [a, m, rest_m](const Vec3& xi) {
    return std::pow(a(xi) + rest_m(xi), 1.0 / m - 1.0) * a.partial(0, xi) / m;
  };
  auto bracket = [n, tan_a](const Vec3& eta) { return detail::first_axis_bracket(eta, n, tan_a); };
  SymbolSpec target;
  target.name = "normal_hyperbolic";
  target.dim = n;
  target.order = m;
  target.eval = [m, n](const Vec3& eta) {
    double r = 0.0;
    for (int j = 1; j < n; ++j) r += eta[j] * eta[j];
    return std::pow(std::abs(eta[0]), m) - std::pow(r, 0.5 * m);
  };
  ReductionPlan p;
  p.target_form = "|eta_1|^m - |eta'|^m";
  p.source = a;
  p.target = target;
  p.map = CanonicalMap::single_axis("nonelliptic_hyperbolic", n, 0, v, dv, bracket,
                                    Cutoff::cone(dir, half_angle, taper), a.flags.homogeneous);
  p.rho = Smoother::power(0.5 * (m - 1.0));
  p.zeta = Smoother::power(0.5 * (m - 1.0));
  p.cone_direction = dir;
  p.half_angle = half_angle;
  detail::finish_plan(p, 4.0);
  return p;
}

/// Plan for a symbol already in normal form (psi = identity).
inline ReductionPlan identity_plan(const SymbolSpec& a, Cutoff gamma = Cutoff::all()) {
  ReductionPlan p;
  p.target_form = "identity";
  p.source = a;
  p.target = a;
  p.map = CanonicalMap::identity(a.dim, std::move(gamma));
  p.rho = Smoother::identity();
  p.zeta = Smoother::identity();
  detail::finish_plan(p, 4.0);
  return p;
}

// ---------------------------------------------------------------------------
// Gridded application of I_{psi,gamma}

namespace detail {

// K(delta) = N^{-1} sum_j e^{-i x_j delta}: evaluates the spectrum of a grid
// function off the lattice from its lattice values along one axis.
inline Complex dirichlet(const GridSpec& g, int axis, double delta) {
  const std::size_t n = g.n[axis];
  const double dx = g.dx(axis);
  const double off = g.half_cell_offset ? 0.5 : 0.0;
  const double x0 = -g.half_extent[axis] + off * dx;
  const double h = dx * delta;
  const Complex lead = std::polar(1.0, -x0 * delta);
  const double s = std::sin(0.5 * h);
  if (std::abs(s) < 1e-14) {
    // delta at a multiple of the sampling period 2 pi / dx
    const double k = std::round(h / kTwoPi);
    return lead * std::polar(1.0, 0.0 * k);
  }
  // sum_j e^{-i j h} = e^{-i (n-1) h / 2} sin(n h / 2) / sin(h / 2)
  const double nd = static_cast<double>(n);
  return lead * std::polar(std::sin(0.5 * nd * h) / (nd * s), -0.5 * (nd - 1.0) * h);
}

// Evaluates spec at points q(k) (one per lattice node, only where weight(k)
// != 0) and returns weight(k) * spec(q(k)).
struct Resampler {
  GridSpec grid;
  int axis = -1;  // -1: all axes
  std::vector<std::size_t> rows;
  std::vector<Vec3> targets;
  std::vector<double> weights;
  std::vector<std::size_t> direct;  // lattice index of the target, or npos

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Resampler(const GridSpec& g, const CanonicalMap& m) : grid(g), axis(m.changed_axis) {
    for (std::size_t i = 0; i < g.points(); ++i) {
      const Vec3 xi = g.freq_point(i);
      const double w = m.gamma(xi);
      if (w == 0.0) continue;
      const Vec3 eta = m.psi(xi);
      bool ok = true;
      for (int j = 0; j < g.dim; ++j) ok = ok && std::isfinite(eta[j]);
      if (!ok) throw Error(ErrorKind::DomainLeak, "psi undefined where gamma != 0");
      rows.push_back(i);
      targets.push_back(eta);
      weights.push_back(w);
      direct.push_back(lattice_index(eta));
    }
  }

  // Values of the continuous spectrum at the targets from lattice values.
  void forward(const std::vector<Complex>& spec, std::vector<Complex>& out) const {
    std::fill(out.begin(), out.end(), Complex{});
    parallel_chunks(rows.size(), 64, [&](std::size_t b, std::size_t e) {
      for (std::size_t r = b; r < e; ++r)
        out[rows[r]] = weights[r] * (direct[r] != npos ? spec[direct[r]] : eval(spec, rows[r], targets[r]));
    });
  }

  // Adjoint of forward with respect to the plain lattice inner product.
  void adjoint(const std::vector<Complex>& in, std::vector<Complex>& out) const {
    std::fill(out.begin(), out.end(), Complex{});
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Complex c = weights[r] * in[rows[r]];
      if (c == Complex{}) continue;
      if (direct[r] != npos) out[direct[r]] += c;
      else scatter(c, rows[r], targets[r], out);
    }
  }

 private:
  std::size_t lattice_index(const Vec3& eta) const {
    std::size_t lin = 0;
    for (int j = 0; j < grid.dim; ++j) {
      const double q = eta[j] / grid.dxi(j);
      const double k = std::round(q);
      const long nn = static_cast<long>(grid.n[j]);
      if (std::abs(q - k) > 1e-12 * std::max(1.0, std::abs(q))) return npos;
      const long kk = static_cast<long>(k);
      if (kk < -nn / 2 || kk >= nn - nn / 2) return npos;
      lin = lin * grid.n[j] + static_cast<std::size_t>(kk < 0 ? kk + nn : kk);
    }
    return lin;
  }

  Complex eval(const std::vector<Complex>& spec, std::size_t row, const Vec3& eta) const {
    const auto idx = grid.unravel(row);
    if (axis >= 0) {
      Complex s{};
      const std::size_t nn = grid.n[axis];
      for (std::size_t k = 0; k < nn; ++k) {
        auto id = idx;
        id[axis] = k;
        const std::size_t lin = linear(id);
        if (spec[lin] == Complex{}) continue;
        s += spec[lin] * dirichlet(grid, axis, eta[axis] - grid.xi(axis, k));
      }
      return s;
    }
    // All axes: tensor product of 1-D kernels.
    std::vector<std::vector<Complex>> ker(grid.dim);
    for (int j = 0; j < grid.dim; ++j) {
      ker[j].resize(grid.n[j]);
      for (std::size_t k = 0; k < grid.n[j]; ++k) ker[j][k] = dirichlet(grid, j, eta[j] - grid.xi(j, k));
    }
    // Contract the last axis first.
    std::vector<Complex> cur(spec.begin(), spec.end());
    for (int j = grid.dim - 1; j >= 0; --j) {
      const std::size_t nj = grid.n[j];
      std::vector<Complex> next(cur.size() / nj);
      for (std::size_t o = 0; o < next.size(); ++o) {
        Complex acc{};
        const Complex* row = cur.data() + o * nj;
        for (std::size_t k = 0; k < nj; ++k) acc += row[k] * ker[j][k];
        next[o] = acc;
      }
      cur.swap(next);
    }
    return cur[0];
  }

  void scatter(Complex c, std::size_t row, const Vec3& eta, std::vector<Complex>& out) const {
    const auto idx = grid.unravel(row);
    if (axis >= 0) {
      for (std::size_t k = 0; k < grid.n[axis]; ++k) {
        auto id = idx;
        id[axis] = k;
        out[linear(id)] += c * std::conj(dirichlet(grid, axis, eta[axis] - grid.xi(axis, k)));
      }
      return;
    }
    std::vector<std::vector<Complex>> ker(grid.dim);
    for (int j = 0; j < grid.dim; ++j) {
      ker[j].resize(grid.n[j]);
      for (std::size_t k = 0; k < grid.n[j]; ++k) ker[j][k] = std::conj(dirichlet(grid, j, eta[j] - grid.xi(j, k)));
    }
    // Outer product, first axis slowest.
    std::vector<Complex> cur{c};
    for (int j = 0; j < grid.dim; ++j) {
      std::vector<Complex> next(cur.size() * grid.n[j]);
      for (std::size_t o = 0; o < cur.size(); ++o)
        for (std::size_t k = 0; k < grid.n[j]; ++k) next[o * grid.n[j] + k] = cur[o] * ker[j][k];
      cur.swap(next);
    }
    for (std::size_t lin = 0; lin < out.size(); ++lin) out[lin] += cur[lin];
  }

  std::size_t linear(const std::array<std::size_t, kMaxDim>& id) const {
    std::size_t lin = 0;
    for (int j = 0; j < grid.dim; ++j) lin = lin * grid.n[j] + id[j];
    return lin;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Intertwining check

struct EgorovReport {
  std::vector<double> times;
  std::vector<double> residuals;  // max |A - B| / max |A| per time
  double max_residual = 0.0;
  std::string grid_id;
};

/// Compares e^{ita(D)} I phi (closure spectrum, engine synthesis) with
/// I e^{it sigma(D)} phi (engine evolution of phi under sigma, lattice
/// analysis, off-lattice evaluation at psi(xi), cutoff) on the grid.
inline EgorovReport egorov_check(const ReductionPlan& plan, const FreqData& phi, const GridSpec& grid,
                                 const std::vector<double>& times) {
  const auto Iphi = apply(plan.map, phi);
  const detail::Resampler rs(grid, plan.map);
  const auto fac = synthesis_factors(grid);
  EgorovReport rep;
  rep.grid_id = grid.id();
  for (double t : times) {
    GridSpec g = grid;
    g.t0 = g.t1 = t;
    g.nt = 1;
    // Pipeline A.
    check_resolution(plan.source, Iphi.dim, Iphi.support_lo, Iphi.support_hi, phi.spatial_radius, g, std::abs(t));
    const auto fa = make_propagator(plan.source, Iphi, g, nullptr, false).materialize("egorov_a");
    // Pipeline B.
    auto fb = make_propagator(plan.target, phi, g).materialize("egorov_b");
    std::vector<Complex> spec(fb.data.begin(), fb.data.end());
    analyze(spec, g, fac);
    std::vector<Complex> mapped(spec.size());
    rs.forward(spec, mapped);
    synthesize(mapped, g, fac);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < mapped.size(); ++i) {
      num = std::max(num, std::abs(mapped[i] - fa.data[i]));
      den = std::max(den, std::abs(fa.data[i]));
    }
    const double r = den > 0.0 ? num / den : num;
    rep.times.push_back(t);
    rep.residuals.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Weighted operator norm

struct OpNormReport {
  double value = 0.0;        // at the given grid
  double value_fine = 0.0;   // at doubled resolution
  double drift = 0.0;        // relative change
  int iterations = 0;
};

namespace detail {

/// v -> P chi <x>^kappa I <x>^{-kappa} chi P v on a grid, where chi is a
/// smooth spatial window on |x| <= L/2 and P a smooth frequency ball at half
/// the Nyquist radius; the restriction keeps the lattice operator close to its
/// continuum counterpart.
class WeightedOperator {
 public:
  WeightedOperator(const CanonicalMap& m, double kappa, const GridSpec& g)
      : grid_(g), rs_(g, m), fac_(synthesis_factors(g)) {
    const std::size_t n = g.points();
    wplus_.resize(n);
    wminus_.resize(n);
    proj_.resize(n);
    double nyq = std::numeric_limits<double>::infinity();
    double half = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.dim; ++j) {
      nyq = std::min(nyq, g.nyquist(j));
      half = std::min(half, g.half_extent[j]);
    }
    const Cutoff ball = Cutoff::ball(0.5 * nyq, 0.15 * nyq);
    const Cutoff window = Cutoff::ball(0.5 * half, 0.15 * half);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 x = g.space_point(i);
      const double chi = window(x);
      const double b = ::dispersmooth::bracket(norm(x, g.dim));
      wplus_[i] = chi * std::pow(b, kappa);
      wminus_[i] = chi * std::pow(b, -kappa);
      proj_[i] = ball(g.freq_point(i));
    }
  }

  // y = T v
  void apply(const std::vector<Complex>& v, std::vector<Complex>& y) const {
    std::vector<Complex> buf = v;
    project(buf);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= wminus_[i];
    analyze(buf, grid_, fac_);
    rs_.forward(buf, y);
    synthesize(y, grid_, fac_);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= wplus_[i];
    project(y);
  }

  // y = T^* v; analysis and synthesis are adjoint up to the constant N dx^n dxi^n / (2 pi)^n.
  void apply_adjoint(const std::vector<Complex>& v, std::vector<Complex>& y) const {
    std::vector<Complex> buf = v;
    project(buf);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= wplus_[i];
    analyze(buf, grid_, fac_);
    rs_.adjoint(buf, y);
    synthesize(y, grid_, fac_);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= wminus_[i];
    project(y);
  }

 private:
  void project(std::vector<Complex>& v) const { apply_multiplier(v, grid_, proj_); }

  GridSpec grid_;
  Resampler rs_;
  std::vector<Complex> fac_;
  std::vector<double> wplus_;
  std::vector<double> wminus_;
  std::vector<double> proj_;
};

inline double power_iteration(const WeightedOperator& T, std::size_t n, int iterations, std::uint64_t seed) {
  const CounterRng rng(seed, 7);
  std::vector<Complex> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = Complex(rng.normal(2 * i), rng.normal(2 * i + 1));
  std::vector<Complex> y(n);
  std::vector<Complex> z(n);
  auto nrm = [](const std::vector<Complex>& a) {
    double s = 0.0;
    for (const auto& c : a) s += std::norm(c);
    return std::sqrt(s);
  };
  double est = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const double nv = nrm(v);
    if (nv == 0.0) return 0.0;
    for (auto& c : v) c /= nv;
    T.apply(v, y);
    est = nrm(y);
    T.apply_adjoint(y, z);
    v.swap(z);
  }
  return est;
}

}  // namespace detail

/// Dominant singular value of <x>^kappa I_{psi,gamma} <x>^{-kappa} on the grid
/// (restricted to well-resolved functions) by power iteration on T^* T, and
/// the same at doubled resolution (same box, twice the points per axis).
inline OpNormReport weighted_opnorm(const CanonicalMap& m, double kappa, const GridSpec& grid, int iterations = 40,
                                    std::uint64_t seed = kDefaultSeed) {
  if (m.homogeneous && !(std::abs(kappa) < 0.5 * m.dim))
    throw Error(ErrorKind::Hypothesis, "weighted bound for homogeneous maps needs |kappa| < n/2", kappa);
  OpNormReport r;
  r.iterations = iterations;
  r.value = detail::power_iteration(detail::WeightedOperator(m, kappa, grid), grid.points(), iterations, seed);
  GridSpec fine = grid;
  for (int j = 0; j < grid.dim; ++j) fine.n[j] = 2 * grid.n[j];
  r.value_fine = detail::power_iteration(detail::WeightedOperator(m, kappa, fine), fine.points(), iterations, seed);
  r.drift = rel_diff(r.value, r.value_fine);
  return r;
}

}  // namespace dispersmooth

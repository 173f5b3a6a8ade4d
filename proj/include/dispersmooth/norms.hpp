#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dispersmooth/engine.hpp"
#include "dispersmooth/quadrature.hpp"
#include "dispersmooth/symbols.hpp"

namespace dispersmooth {

// ---------------------------------------------------------------------------
// Frequency side

struct FreqSideOptions {
  std::size_t per_axis = 0;  // midpoint cells per axis; 0 = dimension default
  double mass_tol = 1e-10;   // allowed |phi^|^2 mass fraction on cells where the derivative vanishes
};

struct FreqNormResult {
  double value = 0.0;
  double offending_mass = 0.0;  // mass fraction on cells with vanishing derivative
  bool sign_uniform = true;     // derivative keeps one sign on the mass-carrying support
};

/// ((2 pi)^{-n} int |phi^|^2 |sigma|^2 / |d_j f| dxi)^{1/2} by the midpoint
/// rule on the data's support box. Equals the L^2(t x x') norm of
/// sigma(D) e^{itf(D)} phi at every fixed x_j when f is strictly monotone in
/// xi_j on the support (sign_uniform reports whether that holds).
inline FreqNormResult freq_side_norm(const SymbolSpec& f, const Smoother& sigma, const FreqData& phi, int axis = 0,
                                     FreqSideOptions opt = {}) {
  const int dim = phi.dim;
  if (f.dim != dim) throw Error(ErrorKind::Dimension, "symbol and data dimensions differ");
  if (axis < 0 || axis >= dim) throw Error(ErrorKind::Dimension, "axis out of range");
  std::size_t per = opt.per_axis;
  if (per == 0) per = dim == 1 ? 32768 : (dim == 2 ? 1024 : 128);
  Vec3 h{0.0, 0.0, 0.0};
  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) {
    h[j] = (phi.support_hi[j] - phi.support_lo[j]) / static_cast<double>(per);
    total *= per;
  }
  struct Acc {
    double integral = 0.0, mass = 0.0, bad = 0.0, pos = 0.0, neg = 0.0, dmax = 0.0;
  };
  constexpr std::size_t chunk = 8192;
  const std::size_t nchunks = (total + chunk - 1) / chunk;
  std::vector<Acc> part(nchunks);
  std::vector<double> dvals(total);
  std::vector<double> mvals(total);
  std::vector<double> ivals(total);
  parallel_chunks(total, chunk, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Vec3 xi{0.0, 0.0, 0.0};
      std::size_t rem = i;
      for (int j = dim - 1; j >= 0; --j) {
        xi[j] = phi.support_lo[j] + (static_cast<double>(rem % per) + 0.5) * h[j];
        rem /= per;
      }
      const double m = std::norm(phi(xi));
      mvals[i] = m;
      if (m == 0.0) {
        dvals[i] = std::numeric_limits<double>::quiet_NaN();
        ivals[i] = 0.0;
        continue;
      }
      const double d = f.partial(axis, xi);
      const double s = sigma(xi);
      dvals[i] = d;
      ivals[i] = d != 0.0 ? m * s * s / std::abs(d) : 0.0;
    }
  });
  parallel_chunks(total, chunk, [&](std::size_t b, std::size_t e) {
    Acc a;
    for (std::size_t i = b; i < e; ++i)
      if (std::isfinite(dvals[i])) a.dmax = std::max(a.dmax, std::abs(dvals[i]));
    part[b / chunk] = a;
  });
  double dmax = 0.0;
  for (const auto& a : part) dmax = std::max(dmax, a.dmax);
  const double dzero = 1e-12 * dmax;
  parallel_chunks(total, chunk, [&](std::size_t b, std::size_t e) {
    Acc a;
    for (std::size_t i = b; i < e; ++i) {
      const double m = mvals[i];
      a.mass += m;
      if (m == 0.0) continue;
      const double d = dvals[i];
      if (std::abs(d) <= dzero) {
        a.bad += m;
        continue;
      }
      a.integral += ivals[i];
      (d > 0.0 ? a.pos : a.neg) += m;
    }
    part[b / chunk] = a;
  });
  Acc tot;
  for (const auto& a : part) {
    tot.integral += a.integral;
    tot.mass += a.mass;
    tot.bad += a.bad;
    tot.pos += a.pos;
    tot.neg += a.neg;
  }
  FreqNormResult r;
  r.offending_mass = tot.mass > 0.0 ? tot.bad / tot.mass : 0.0;
  if (r.offending_mass > opt.mass_tol)
    throw Error(ErrorKind::Monotonicity, "derivative vanishes on a set carrying data mass", r.offending_mass);
  r.sign_uniform = std::min(tot.pos, tot.neg) <= opt.mass_tol * tot.mass;
  double vol = 1.0;
  for (int j = 0; j < dim; ++j) vol *= h[j];
  r.value = std::sqrt(tot.integral * vol / std::pow(kTwoPi, dim));
  return r;
}

/// Radial profile pair used by the radial identity: a(xi) = f(|xi|).
struct RadialSymbol {
  std::function<double(double)> f;
  std::function<double(double)> df;

  static RadialSymbol of(const SymbolSpec& a) {
    if (!a.radial_profile) throw Error(ErrorKind::InvalidArgument, a.name + " has no radial profile");
    return {a.radial_profile->f, a.radial_profile->df};
  }
};

struct RadialOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-11;
  int min_angular = 64;
};

namespace detail {

// int_{S^{n-1}} e^{i rho x.omega} phi^(rho omega) d omega.
inline Complex sphere_integral(const FreqData& phi, int dim, double rho, const Vec3& x, int min_angular) {
  const double rx = rho * norm(x, dim);
  if (dim == 1) {
    return std::polar(1.0, rho * x[0]) * phi({rho, 0.0, 0.0}) + std::polar(1.0, -rho * x[0]) * phi({-rho, 0.0, 0.0});
  }
  if (dim == 2) {
    const int m = std::max(min_angular, 16 * (1 + static_cast<int>(std::ceil(rx / 8.0))) + 2 * static_cast<int>(rx));
    Complex s{};
    for (int i = 0; i < m; ++i) {
      const double th = kTwoPi * i / m;
      const Vec3 w{std::cos(th), std::sin(th), 0.0};
      s += std::polar(1.0, rho * dot(x, w, 2)) * phi(scaled(w, rho));
    }
    return s * (kTwoPi / m);
  }
  const int npolar = std::max(min_angular / 2, 16 * (2 + static_cast<int>(std::ceil(rx / 12.0))));
  const int nazi = std::max(min_angular, 2 * npolar);
  const auto rule = quad::gauss_legendre(npolar);
  Complex s{};
  for (int p = 0; p < npolar; ++p) {
    const double c = rule->nodes[p];
    const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
    Complex ring{};
    for (int q = 0; q < nazi; ++q) {
      const double ph = kTwoPi * q / nazi;
      const Vec3 w{sn * std::cos(ph), sn * std::sin(ph), c};
      ring += std::polar(1.0, rho * dot(x, w, 3)) * phi(scaled(w, rho));
    }
    s += rule->weights[p] * ring * (kTwoPi / nazi);
  }
  return s;
}

}  // namespace detail

/// ((2 pi)^{-2n+1} int_0^inf |int_{S^{n-1}} e^{i rho x.omega} phi^(rho omega) d omega|^2
///   rho^{2(n-1)} |chi sigma|^2 / |f'| d rho)^{1/2}, for n in {1, 2, 3}.
/// chi and sigma are radial and evaluated at rho e_1.
inline double freq_side_norm_radial(const RadialSymbol& f, const Smoother& sigma, const Cutoff& chi,
                                    const FreqData& phi, const Vec3& x, RadialOptions opt = {}) {
  const int dim = phi.dim;
  if (dim < 1 || dim > 3) throw Error(ErrorKind::Dimension, "radial identity implemented for n = 1, 2, 3");
  const double rmax = phi.support_radius();
  // Monotonicity of f on the support, sampled.
  {
    constexpr int samples = 4001;
    double pos = 0.0;
    double neg = 0.0;
    for (int i = 1; i < samples; ++i) {
      const double r = rmax * i / (samples - 1.0);
      if (chi({r, 0.0, 0.0}) == 0.0) continue;
      const double d = f.df(r);
      if (d > 0.0) pos += 1.0;
      else if (d < 0.0) neg += 1.0;
      else pos += 0.0;
    }
    if (pos > 0.0 && neg > 0.0)
      throw Error(ErrorKind::Monotonicity, "radial profile not monotone on the cutoff support", std::min(pos, neg));
  }
  auto integrand = [&](double rho) {
    if (rho <= 0.0) return 0.0;
    const Vec3 e{rho, 0.0, 0.0};
    const double c = chi(e);
    if (c == 0.0) return 0.0;
    const Complex in = detail::sphere_integral(phi, dim, rho, x, opt.min_angular);
    if (in == Complex{}) return 0.0;
    const double s = sigma(e);
    const double d = std::abs(f.df(rho));
    if (d == 0.0) return 0.0;
    return std::norm(in) * std::pow(rho, 2.0 * (dim - 1)) * c * c * s * s / d;
  };
  // Split the range so the adaptive rule sees the oscillation scale.
  const int pieces = 8 + static_cast<int>(std::ceil(rmax * norm(x, dim) / 4.0));
  double total = 0.0;
  for (int p = 0; p < pieces; ++p) {
    const double a = rmax * p / pieces;
    const double b = rmax * (p + 1) / pieces;
    total += quad::integrate(integrand, a, b, opt.abs_tol / pieces, opt.rel_tol, 4000).value;
  }
  return std::sqrt(total / std::pow(kTwoPi, 2 * dim - 1));
}

// ---------------------------------------------------------------------------
// Time side

struct TimeWindowPolicy {
  enum class Mode { Aitken, Plain, PowerTail };
  Mode mode = Mode::Aitken;
  double tail_exponent = 0.0;  // PowerTail: integrand ~ |t|^{-p} with p > 1
  double window_tol = 1e-3;
  bool throw_on_inadequate = true;
};

struct Geometry {
  enum class Kind { FixedAxis, SpaceTime };
  Kind kind = Kind::SpaceTime;
  int axis = 0;
  double coordinate = 0.0;
  double radius = std::numeric_limits<double>::infinity();  // space-time: restrict to |x| <= radius

  static Geometry fixed(int axis, double coordinate) { return {Kind::FixedAxis, axis, coordinate}; }
  static Geometry space_time(double radius = std::numeric_limits<double>::infinity()) {
    Geometry g;
    g.radius = radius;
    return g;
  }
};

struct NormResult {
  double value = 0.0;       // reported norm (tail-extrapolated in Aitken mode)
  double plain = 0.0;       // trapezoid over the full window, no extrapolation
  double increment = 0.0;   // adequacy measure compared against window_tol
  bool adequate = true;
  std::string grid_id;
  std::string route = "time_side";
};

namespace detail {

// Trapezoid of g over [s t0, s t1] with linear interpolation at cut ends.
inline double window_integral(const std::vector<double>& g, const GridSpec& grid, double s) {
  const double dt = grid.dt();
  if (g.size() < 2 || dt == 0.0) return 0.0;
  const double lo = s * grid.t0;
  const double hi = s * grid.t1;
  const double ulo = (lo - grid.t0) / dt;
  const double uhi = (hi - grid.t0) / dt;
  auto value_at = [&](double u) {
    const double fl = std::floor(u);
    const std::size_t k = static_cast<std::size_t>(std::clamp(fl, 0.0, static_cast<double>(g.size() - 1)));
    if (k + 1 >= g.size()) return g.back();
    const double w = u - fl;
    return (1.0 - w) * g[k] + w * g[k + 1];
  };
  const double eps = 1e-9;
  const std::size_t klo = static_cast<std::size_t>(std::ceil(ulo - eps));
  const std::size_t khi = static_cast<std::size_t>(std::floor(uhi + eps));
  if (khi <= klo) return 0.5 * (value_at(ulo) + value_at(uhi)) * (uhi - ulo) * dt;
  double sum = 0.0;
  for (std::size_t k = klo; k < khi; ++k) sum += 0.5 * (g[k] + g[k + 1]);
  sum *= dt;
  const double left = static_cast<double>(klo) - ulo;
  const double right = uhi - static_cast<double>(khi);
  if (left > eps) sum += 0.5 * (value_at(ulo) + g[klo]) * left * dt;
  if (right > eps) sum += 0.5 * (g[khi] + value_at(uhi)) * right * dt;
  return sum;
}

}  // namespace detail

/// Turns per-time-node spatial integrals into a windowed norm following the
/// policy. Aitken mode extrapolates the tail from nested windows W/4, W/2, W
/// (scaled about t = 0) and judges adequacy against the same extrapolation
/// one level down. PowerTail does the same with the increment ratio fixed at
/// 2^{1-p} instead of estimated.
inline NormResult window_norm(const std::vector<double>& g, const GridSpec& grid, const TimeWindowPolicy& policy) {
  NormResult r;
  r.grid_id = grid.id();
  const double full = detail::window_integral(g, grid, 1.0);
  r.plain = std::sqrt(std::max(full, 0.0));
  if (policy.mode == TimeWindowPolicy::Mode::Plain) {
    const double part = std::sqrt(std::max(detail::window_integral(g, grid, 2.0 / 3.0), 0.0));
    r.value = r.plain;
    r.increment = rel_diff(part, r.plain);
  } else if (policy.mode == TimeWindowPolicy::Mode::PowerTail) {
    if (!(policy.tail_exponent > 1.0))
      throw Error(ErrorKind::InvalidArgument, "power tail needs an exponent above 1", policy.tail_exponent);
    const double q = std::pow(2.0, 1.0 - policy.tail_exponent);
    const double s4 = detail::window_integral(g, grid, 0.25);
    const double s2 = detail::window_integral(g, grid, 0.5);
    const double e1 = full + (full - s2) * q / (1.0 - q);
    const double e0 = s2 + (s2 - s4) * q / (1.0 - q);
    r.value = std::sqrt(std::max(e1, 0.0));
    r.increment = rel_diff(std::sqrt(std::max(e0, 0.0)), r.value);
  } else {
    const double s8 = detail::window_integral(g, grid, 0.125);
    const double s4 = detail::window_integral(g, grid, 0.25);
    const double s2 = detail::window_integral(g, grid, 0.5);
    const double e1 = quad::aitken(s4, s2, full);
    const double e0 = quad::aitken(s8, s4, s2);
    r.value = std::sqrt(std::max(e1, 0.0));
    r.increment = rel_diff(std::sqrt(std::max(e0, 0.0)), r.value);
  }
  r.adequate = r.increment < policy.window_tol;
  if (!r.adequate && policy.throw_on_inadequate)
    throw Error(ErrorKind::WindowInadequate, "time window too short for the requested tolerance", r.increment);
  return r;
}

namespace detail {

// Spatial quadrature of |w u|^2 over the geometry for one slice.
struct SliceIntegrator {
  GridSpec grid;
  std::vector<std::size_t> index;  // contributing nodes
  std::vector<double> weight;      // w(x)^2 times the cell measure

  SliceIntegrator(const GridSpec& g, const Weight& w, const Geometry& geo) : grid(g) {
    const std::size_t total = g.points();
    if (geo.kind == Geometry::Kind::FixedAxis) {
      if (geo.axis < 0 || geo.axis >= g.dim) throw Error(ErrorKind::Dimension, "geometry axis out of range");
      const std::size_t ia = g.nearest_x(geo.axis, geo.coordinate);
      if (std::abs(g.x(geo.axis, ia) - geo.coordinate) > 1e-9 * (1.0 + std::abs(geo.coordinate)))
        throw Error(ErrorKind::InvalidArgument, "fixed coordinate is not a grid node");
      double cell = 1.0;
      for (int j = 0; j < g.dim; ++j)
        if (j != geo.axis) cell *= g.dx(j);
      for (std::size_t i = 0; i < total; ++i) {
        if (g.unravel(i)[geo.axis] != ia) continue;
        const double wv = w(g.space_point(i));
        if (!std::isfinite(wv)) throw Error(ErrorKind::Singular, "weight not finite at a grid node");
        index.push_back(i);
        weight.push_back(wv * wv * cell);
      }
    } else {
      const double cell = g.cell_volume();
      for (std::size_t i = 0; i < total; ++i) {
        const Vec3 x = g.space_point(i);
        if (norm(x, g.dim) > geo.radius) continue;
        const double wv = w(x);
        if (!std::isfinite(wv)) throw Error(ErrorKind::Singular, "weight not finite at a grid node");
        index.push_back(i);
        weight.push_back(wv * wv * cell);
      }
    }
  }

  double operator()(std::span<const Complex> slice) const {
    double s = 0.0;
    for (std::size_t p = 0; p < index.size(); ++p) s += weight[p] * std::norm(slice[index[p]]);
    return s;
  }
};

}  // namespace detail

/// Per-time-node spatial integrals of |w sigma(D) u|^2 from a stored field.
inline std::vector<double> spatial_integrals(const Field& field, const Weight& w, const Smoother& sigma,
                                             const Geometry& geo) {
  const GridSpec& g = field.grid;
  const detail::SliceIntegrator integ(g, w, geo);
  std::vector<double> out(g.nt, 0.0);
  const bool plain = sigma.is_identity();
  const auto m = plain ? std::vector<double>{} : sample_smoother(sigma, g);
  parallel_chunks(g.nt, 8, [&](std::size_t b, std::size_t e) {
    std::vector<Complex> buf(g.points());
    for (std::size_t k = b; k < e; ++k) {
      if (plain) {
        out[k] = integ(field.slice(k));
      } else {
        std::copy(field.slice(k).begin(), field.slice(k).end(), buf.begin());
        apply_multiplier(buf, g, m);
        out[k] = integ(buf);
      }
    }
  });
  return out;
}

/// Per-time-node spatial integrals streamed from a propagator (the smoother,
/// if any, is already folded into its spectrum).
inline std::vector<double> spatial_integrals(const Propagator& prop, const Weight& w, const Geometry& geo) {
  const detail::SliceIntegrator integ(prop.grid(), w, geo);
  std::vector<double> out(prop.grid().nt, 0.0);
  prop.for_each_slice([&](std::size_t k, std::span<const Complex> s) { out[k] = integ(s); });
  return out;
}

/// ||w sigma(D) u||_{L^2} over the time window and the requested geometry.
inline NormResult time_side_norm(const Field& field, const Weight& w, const Smoother& sigma, const Geometry& geo,
                                 const TimeWindowPolicy& policy = {}) {
  return window_norm(spatial_integrals(field, w, sigma, geo), field.grid, policy);
}

inline NormResult time_side_norm(const Propagator& prop, const Weight& w, const Geometry& geo,
                                 const TimeWindowPolicy& policy = {}) {
  return window_norm(spatial_integrals(prop, w, geo), prop.grid(), policy);
}

/// ||u(., x)||_{L^2(t)} at arbitrary points by direct modal summation; one
/// result per point. Intended for n = 1 pointwise norms.
inline std::vector<NormResult> time_side_norm_points(const Propagator& prop, const std::vector<Vec3>& xs,
                                                     const TimeWindowPolicy& policy = {}) {
  const auto vals = prop.sample_points(xs);
  const std::size_t np = xs.size();
  const std::size_t nt = prop.grid().nt;
  std::vector<NormResult> out;
  for (std::size_t p = 0; p < np; ++p) {
    std::vector<double> g(nt);
    for (std::size_t k = 0; k < nt; ++k) g[k] = std::norm(vals[k * np + p]);
    out.push_back(window_norm(g, prop.grid(), policy));
  }
  return out;
}

/// g(x) = ||w(x) sigma(D) u(., x)||_{L^2(t)} at every node, then its L^p norm
/// over x (p = inf gives the max).
inline double mixed_norm(const Field& field, const Smoother& sigma, const Weight& w, double p) {
  const GridSpec& g = field.grid;
  const std::size_t n = g.points();
  const double dt = g.dt();
  std::vector<double> acc(n, 0.0);
  const bool plain = sigma.is_identity();
  const auto m = plain ? std::vector<double>{} : sample_smoother(sigma, g);
  std::vector<Complex> buf(n);
  for (std::size_t k = 0; k < g.nt; ++k) {
    const double tw = (k == 0 || k + 1 == g.nt) ? 0.5 * dt : dt;
    std::copy(field.slice(k).begin(), field.slice(k).end(), buf.begin());
    if (!plain) apply_multiplier(buf, g, m);
    for (std::size_t i = 0; i < n; ++i) acc[i] += tw * std::norm(buf[i]);
  }
  double out = 0.0;
  const bool inf = !std::isfinite(p);
  for (std::size_t i = 0; i < n; ++i) {
    const double wv = w(g.space_point(i));
    const double gx = std::abs(wv) * std::sqrt(acc[i]);
    if (inf) out = std::max(out, gx);
    else out += std::pow(gx, p) * g.cell_volume();
  }
  return inf ? out : std::pow(out, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Restriction and empirical constants

/// (int_{S^1} |phi^(rho omega)|^2 rho d omega)^{1/2} by the trapezoid rule.
inline double restriction_norm(const FreqData& phi, double rho, int samples = 2048) {
  if (phi.dim != 2) throw Error(ErrorKind::Dimension, "restriction_norm is implemented for n = 2");
  if (!(rho > 0.0)) throw Error(ErrorKind::InvalidArgument, "restriction_norm needs rho > 0");
  double s = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double th = kTwoPi * i / samples;
    s += std::norm(phi({rho * std::cos(th), rho * std::sin(th), 0.0}));
  }
  return std::sqrt(s * kTwoPi / samples * rho);
}

struct EmpiricalRow {
  std::string label;
  double lhs = 0.0;
  double data_norm = 0.0;
  double ratio = 0.0;
  double increment = 0.0;
  bool adequate = true;
};

struct EmpiricalConstant {
  double sup = 0.0;
  std::size_t argsup = 0;
  std::vector<EmpiricalRow> table;
};

/// sup over the family of ||w sigma(D) e^{ita(D)} phi|| / ||phi|| on the given
/// geometry; grids come from grid_for(phi).
template <class GridFor>
EmpiricalConstant empirical_constant(const SymbolSpec& a, const Smoother& sigma, const Weight& w,
                                     const std::vector<FreqData>& family, GridFor&& grid_for,
                                     const Geometry& geo = Geometry::space_time(),
                                     const TimeWindowPolicy& policy = {}) {
  if (family.empty()) throw Error(ErrorKind::InvalidArgument, "empirical_constant needs a nonempty family");
  EmpiricalConstant out;
  out.table.resize(family.size());
  for (std::size_t d = 0; d < family.size(); ++d) {
    const FreqData& phi = family[d];
    const GridSpec grid = grid_for(phi);
    const auto prop = make_propagator(a, phi, grid, sigma.is_identity() ? nullptr : &sigma);
    const auto r = time_side_norm(prop, w, geo, policy);
    EmpiricalRow row;
    row.label = phi.label;
    row.lhs = r.value;
    row.data_norm = phi.l2_norm();
    row.ratio = row.lhs / row.data_norm;
    row.increment = r.increment;
    row.adequate = r.adequate;
    out.table[d] = row;
  }
  for (std::size_t d = 0; d < out.table.size(); ++d)
    if (out.table[d].ratio > out.sup) {
      out.sup = out.table[d].ratio;
      out.argsup = d;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Three-dimensional radial data through the one-dimensional odd reduction

/// For radial data in R^3 with phi^(xi) = h(|xi|) and a radial symbol f(|xi|),
/// r u(t, r) solves the one-dimensional problem with odd data whose transform
/// is v^(rho) = rho h(|rho|) / (2 pi i). Norms of radial quantities reduce to
/// line integrals: int_{R^3} |w u|^2 dx = 2 pi int_R w(|r|)^2 |v|^2 dr.
struct RadialReduction {
  FreqData line_data;     // v on the line
  SymbolSpec line_symbol; // f(|rho|)
  double measure = kTwoPi;

  static RadialReduction make(const FreqData& phi3, const SymbolSpec& a3) {
    if (phi3.dim != 3 || a3.dim != 3) throw Error(ErrorKind::Dimension, "radial reduction needs n = 3");
    if (!a3.radial_profile) throw Error(ErrorKind::InvalidArgument, "radial reduction needs a radial symbol");
    RadialReduction r;
    const double R = phi3.support_radius();
    auto base = phi3.spectrum;
    r.line_data = FreqData::from_spectrum(
        1,
        [base](const Vec3& xi) {
          const double rho = xi[0];
          return rho * base({std::abs(rho), 0.0, 0.0}) / Complex(0.0, kTwoPi);
        },
        {-R, 0.0, 0.0}, {R, 0.0, 0.0}, phi3.spatial_radius, phi3.label + ":radial");
    const auto prof = *a3.radial_profile;
    SymbolSpec s;
    s.name = a3.name + ":radial_line";
    s.dim = 1;
    s.order = a3.order;
    s.eval = [prof](const Vec3& xi) { return prof.f(std::abs(xi[0])); };
    s.grad = [prof](const Vec3& xi) {
      return Vec3{prof.df(std::abs(xi[0])) * (xi[0] < 0.0 ? -1.0 : 1.0), 0.0, 0.0};
    };
    s.flags = a3.flags;
    s.singular_origin = a3.singular_origin;
    r.line_symbol = std::move(s);
    return r;
  }

  /// L^2(R^3) norm of the radial datum.
  double data_norm() const { return std::sqrt(measure) * line_data.l2_norm(); }
};

}  // namespace dispersmooth

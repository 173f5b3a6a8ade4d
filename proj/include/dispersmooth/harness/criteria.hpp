#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dispersmooth/canonical.hpp"
#include "dispersmooth/comparison.hpp"
#include "dispersmooth/constants.hpp"
#include "dispersmooth/inhomog.hpp"
#include "dispersmooth/harness/report.hpp"
#include "dispersmooth/norms.hpp"
#include "dispersmooth/rng.hpp"

namespace dispersmooth::harness {

struct SuiteOptions {
  std::uint64_t seed = kDefaultSeed;
  // Mutation switch: evaluates the frequency-side prefactor with the wrong
  // sign of the exponent of 2 pi. The oracle scenario must then fail.
  bool flip_prefactor = false;
};

struct Criterion {
  int index = 0;
  std::string id;
  std::string title;
  std::string known_deviation;  // non-empty when a failure is expected and documented
  std::function<std::vector<ReportRow>(const SuiteOptions&)> run;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline std::size_t pow2_at_least(double v) {
  std::size_t n = 16;
  while (static_cast<double>(n) < v) n *= 2;
  return n;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

/// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Smallest 1-D grid holding the data for |t| <= T with the resolution rule
/// and a 5% margin on both sides.
inline GridSpec line_grid(const SymbolSpec& a, const FreqData& phi, double T, double dt) {
  const double speed = max_grad_over_box(a, 1, phi.support_lo, phi.support_hi);
  const double L = 1.05 * 1.25 * (T * speed + phi.spatial_radius);
  const std::size_t N = pow2_at_least(1.05 * 2.0 * phi.support_extent(0) * 2.0 * L / kPi);
  const auto nt = static_cast<std::size_t>(std::ceil(2.0 * T / dt)) + 1;
  return GridSpec::make(1, L, N, -T, T, nt);
}

inline SymbolSpec linear_symbol(double c) {
  SymbolSpec s;
  s.name = "linear";
  s.dim = 1;
  s.order = 1.0;
  s.eval = [c](const Vec3& xi) { return c * xi[0]; };
  s.grad = [c](const Vec3&) { return Vec3{c, 0.0, 0.0}; };
  s.principal = s.eval;
  s.flags = {true, false, true};
  return s;
}

/// Radial frequency route; `flip` turns the (2 pi)^{-(2n-1)} prefactor into
/// (2 pi)^{2n-1} as a deliberate fault.
inline double freq_route_1d(const SymbolSpec& a, const Smoother& sigma, const FreqData& phi, double x, bool flip) {
  const double v = freq_side_norm_radial(RadialSymbol::of(a), sigma, Cutoff::all(), phi, {x, 0.0, 0.0});
  const int n = phi.dim;
  return flip ? v * std::pow(kTwoPi, 2 * n - 1) : v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// 1. Pointwise oracle for xi^2 with |D|^{1/2} on a Gaussian

inline std::vector<ReportRow> pointwise_oracle(const SuiteOptions& opt) {
  const std::string id = "pointwise_oracle";
  const auto start = detail::Clock::now();
  std::vector<ReportRow> rows;
  const auto a = catalog("schrodinger", {}, 1);
  const auto sigma = Smoother::power(0.5);
  // phi^ = e^{-xi^2/2}
  const auto phi = FreqData::gaussian(1, 1.0, {0, 0, 0}, {0, 0, 0}, 1.0 / std::sqrt(kTwoPi));
  // |u(t, x)|^2 decays like |t|^{-3/2}, so the window is long; its time
  // spectrum decays like e^{-|omega|/2}, so a coarse step is enough.
  const auto grid = GridSpec::make(1, 7000.0, 131072, -320.0, 320.0, 3201);
  const auto prop = make_propagator(a, phi, grid, &sigma);
  const std::vector<double> xs{0.0, 1.0, -2.0};
  std::vector<Vec3> pts;
  for (double x : xs) pts.push_back({x, 0.0, 0.0});
  TimeWindowPolicy pol;
  pol.throw_on_inadequate = false;
  const auto res = time_side_norm_points(prop, pts, pol);
  const double stated = std::sqrt(std::sqrt(kPi) / 2.0 / kTwoPi);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::string at = "x=" + detail::fmt(xs[i]);
    rows.push_back(rel_row(id, "time_norm_vs_stated " + at, res[i].value, stated, 1e-3, grid.id()));
    // Both branches xi > 0 and xi < 0 reach x; their cross term is e^{-x^2}.
    const double two_branch = std::sqrt(std::sqrt(kPi) / 2.0 * (1.0 + std::exp(-xs[i] * xs[i])) / kTwoPi);
    rows.push_back(rel_row(id, "time_norm_vs_two_branch " + at, res[i].value, two_branch, 1e-3, grid.id()));
    const double freq = detail::freq_route_1d(a, sigma, phi, xs[i], opt.flip_prefactor);
    rows.push_back(rel_row(id, "time_norm_vs_freq_route " + at, res[i].value, freq, 1e-3, grid.id()));
    rows.push_back(info_row(id, "window_increment " + at, res[i].increment, grid.id()));
  }
  rows.push_back(bound_row(id, "wall_seconds", detail::seconds_since(start), 10.0, true));
  return rows;
}

// ---------------------------------------------------------------------------
// 2. Constancy: |sigma|^2 / |f'| = 1/2 for xi^2 with |D|^{1/2}

inline std::vector<ReportRow> constancy_identity(const SuiteOptions& opt) {
  const std::string id = "constancy_identity";
  std::vector<ReportRow> rows;
  const auto a = catalog("schrodinger", {}, 1);
  const auto sigma = Smoother::power(0.5);
  const CounterRng rng(opt.seed, 2);
  double worst_freq = 0.0;
  double worst_time = 0.0;
  std::string grid_id;
  for (int q = 0; q < 20; ++q) {
    const double k = rng.uniform(3 * q, 1.5, 4.0);
    const double xq = rng.uniform(3 * q + 1, -3.0, 3.0);
    const double x = rng.uniform(3 * q + 2, -1.0, 1.0);
    const auto phi = half_line_bump(1, k, 0.5, 0.5, 0.5, xq);
    // ||phi||^2 = (2 pi)^{-1} int |phi^|^2 by adaptive quadrature, split at the ramp.
    auto dens = [&](double xi) { return std::norm(phi({xi, 0.0, 0.0})); };
    const double hi = phi.support_hi[0];
    const double mass = quad::integrate(dens, 0.5, 1.0, 1e-16, 1e-14).value +
                        quad::integrate(dens, 1.0, k, 1e-16, 1e-14).value +
                        quad::integrate(dens, k, hi, 1e-16, 1e-14).value;
    const double expected = std::sqrt(mass / kTwoPi / 2.0);
    FreqSideOptions fo;
    fo.per_axis = 1 << 17;
    const double fs = freq_side_norm(a, sigma, phi, 0, fo).value;
    worst_freq = std::max(worst_freq, std::abs(fs - expected) / expected);
    const auto grid = detail::line_grid(a, phi, 16.0, 0.005);
    grid_id = grid.id();
    const auto prop = make_propagator(a, phi, grid, &sigma);
    const auto ts = time_side_norm_points(prop, {{x, 0.0, 0.0}}).front();
    worst_time = std::max(worst_time, std::abs(ts.value - expected) / expected);
  }
  rows.push_back(bound_row(id, "max_rel_error_freq_route (20 data)", worst_freq, 1e-10, true));
  rows.push_back(bound_row(id, "max_rel_error_time_route (20 data)", worst_time, 1e-3, true, grid_id));
  return rows;
}

// ---------------------------------------------------------------------------
// 3. Order change on half-line data, one and two dimensions

inline std::vector<ReportRow> order_change(const SuiteOptions&) {
  const std::string id = "order_change";
  std::vector<ReportRow> rows;
  const auto d1 = half_line_bump(1, 3.0, 0.7, 0.5, 0.5, 0.2);
  const auto d2 = half_line_bump(2, 3.0, 0.3, 0.5, 0.5);
  const auto eq = model_equalities({2.0}, d1, d2);
  for (const auto& r : eq)
    rows.push_back(rel_row(id, r.name + " m=2 vs l=1 freq", r.lhs, r.factor * r.rhs, 1e-6));

  // 1-D time route: |D|^{1/2} e^{it D^2} against e^{it|D|}.
  {
    const auto a2 = catalog("power", {2.0}, 1);
    const auto a1 = catalog("power", {1.0}, 1);
    const auto s2 = Smoother::power(0.5);
    const auto grid = detail::line_grid(a2, d1, 24.0, 0.004);
    const std::vector<Vec3> xs{{0.0, 0, 0}, {1.5, 0, 0}};
    TimeWindowPolicy pol;
    pol.mode = TimeWindowPolicy::Mode::Plain;
    pol.throw_on_inadequate = false;
    const auto p2 = make_propagator(a2, d1, grid, &s2);
    const auto p1 = make_propagator(a1, d1, grid);
    const auto r2 = time_side_norm_points(p2, xs, pol);
    const auto r1 = time_side_norm_points(p1, xs, pol);
    for (std::size_t i = 0; i < xs.size(); ++i)
      rows.push_back(rel_row(id, "order_1d m=2 vs l=1 time x=" + detail::fmt(xs[i][0]), r2[i].value,
                             std::sqrt(0.5) * r1[i].value, 1e-3, grid.id()));
  }

  // 2-D time route. At fixed x_0, Plancherel in x_1 splits the norm into
  // one-dimensional evolutions e^{it c xi_0} with c = |xi_1|^{m-1}, weighted by
  // the smoother |xi_1|^{m-1}, integrated over xi_1.
  {
    const auto rule = quad::gauss_legendre(24);
    const double lo = 1.4;
    const double hi = 4.6;
    auto norm_for = [&](double m) {
      double total = 0.0;
      for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
        const double e1 = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule->nodes[i];
        const double c = std::pow(e1, m - 1.0);
        const auto slice = FreqData::from_spectrum(
            1, [&d2, e1](const Vec3& xi) { return d2({xi[0], e1, 0.0}); }, {d2.support_lo[0], 0, 0},
            {d2.support_hi[0], 0, 0}, d2.spatial_radius, "slice");
        const auto s = detail::linear_symbol(c);
        const double T = 1.1 * d2.spatial_radius / c;
        const auto grid = detail::line_grid(s, slice, T, 0.5 / (c * slice.support_extent(0)));
        TimeWindowPolicy pol;
        pol.mode = TimeWindowPolicy::Mode::Plain;
        pol.throw_on_inadequate = false;
        const auto r = time_side_norm_points(make_propagator(s, slice, grid), {{0.0, 0.0, 0.0}}, pol).front();
        total += 0.5 * (hi - lo) * rule->weights[i] * c * r.value * r.value;
      }
      return std::sqrt(total / kTwoPi);
    };
    const double n2 = norm_for(2.0);
    const double n1 = norm_for(1.0);
    rows.push_back(rel_row(id, "order_2d m=2 vs l=1 time", n2, n1, 1e-3));
    for (const auto& r : eq)
      if (r.name == "order_2d") {
        rows.push_back(rel_row(id, "order_2d time vs freq m=2", n2, r.lhs, 1e-3));
        rows.push_back(rel_row(id, "order_2d time vs freq l=1", n1, r.rhs, 1e-3));
      }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// 4. <D> evolution against <D>^{1/2} smoothing for xi^2

inline std::vector<ReportRow> relativistic_equivalence(const SuiteOptions&) {
  const std::string id = "relativistic_equivalence";
  std::vector<ReportRow> rows;
  for (int n : {1, 3}) {
    FreqData phi;
    std::vector<Vec3> xs;
    if (n == 1) {
      // Vanishes at the origin, where the group velocity of <xi> does.
      const double R = 10.0;
      phi = FreqData::from_spectrum(
          1, [](const Vec3& xi) { return Complex(xi[0] * xi[0] * std::exp(-0.5 * xi[0] * xi[0]), 0.0); },
          {-R, 0, 0}, {R, 0, 0}, 12.0, "xi2_gaussian");
      xs = {{0.0, 0, 0}, {0.7, 0, 0}, {-1.5, 0, 0}};
    } else {
      phi = FreqData::gaussian(3, 1.0);
      xs = {{0.0, 0, 0}, {0.5, 0.3, 0}, {1.2, 0, 0}};
    }
    const auto rel = RadialSymbol::of(catalog("relativistic", {}, n));
    const auto sch = RadialSymbol::of(catalog("schrodinger", {}, n));
    for (const auto& x : xs) {
      const double lhs = freq_side_norm_radial(rel, Smoother::identity(), Cutoff::all(), phi, x);
      const double rhs = freq_side_norm_radial(sch, Smoother::bracket(0.5), Cutoff::all(), phi, x);
      rows.push_back(rel_row(id,
                             "n=" + std::to_string(n) + " x=(" + detail::fmt(x[0]) + " " + detail::fmt(x[1]) + " " +
                                 detail::fmt(x[2]) + ")",
                             lhs, std::sqrt(2.0) * rhs, 1e-6));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// 5. Comparison certificates for rho^m against rho

inline std::vector<ReportRow> comparison_certificates(const SuiteOptions&) {
  const std::string id = "comparison_certificates";
  std::vector<ReportRow> rows;
  const std::vector<FreqData> data{FreqData::gaussian(1, 1.0), FreqData::gaussian(1, 0.7, {0.3, 0, 0}, {1.5, 0, 0}),
                                   half_line_bump(1, 2.0, 0.6, 0.3, 0.4, -0.5)};
  for (double m : {1.0, 2.0, 3.0}) {
    const std::string tag = "m=" + detail::fmt(m);
    auto c = ComparisonCase::radial(catalog("power", {m}, 1), Smoother::power(0.5 * (m - 1.0)),
                                    catalog("power", {1.0}, 1), Smoother::identity());
    c.point = {0.4, 0.0, 0.0};
    auto cert = best_ratio(c, FrequencyBox::interval(0.01, 10.0, 2001));
    rows.push_back(rel_row(id, "A " + tag, cert.A, 1.0 / std::sqrt(m), 1e-10));
    rows.push_back(check_row(id, "constancy_flag " + tag, cert.constant ? 1.0 : 0.0, 1.0, 0.0));
    const auto res = validate(cert, c, data, 1.0, 1.0);
    double slack = 0.0;
    for (const auto& r : res) slack = std::max(slack, std::abs(r.slack));
    rows.push_back(bound_row(id, "max_validation_slack " + tag, slack, 1e-9, true));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// 6. Intertwining of the elliptic reduction for xi^2 in two dimensions

inline std::vector<ReportRow> egorov_intertwining(const SuiteOptions&) {
  const std::string id = "egorov_intertwining";
  std::vector<ReportRow> rows;
  const auto plan = elliptic_reduction(catalog("schrodinger", {}, 2), 0.5);
  const auto phi = FreqData::gaussian(2, 3.0, {0, 0, 0}, {0.0, 3.0, 0});
  const auto coarse = egorov_check(plan, phi, GridSpec::make(2, 64.0, 512, 0.0, 1.0, 2), {0.5, 1.0});
  const auto fine = egorov_check(plan, phi, GridSpec::make(2, 64.0, 1024, 0.0, 1.0, 2), {0.5, 1.0});
  for (std::size_t i = 0; i < coarse.times.size(); ++i) {
    const std::string t = "t=" + detail::fmt(coarse.times[i]);
    rows.push_back(bound_row(id, "residual coarse " + t, coarse.residuals[i], 1e-6, true, coarse.grid_id));
    rows.push_back(bound_row(id, "residual fine " + t, fine.residuals[i], 1e-6, true, fine.grid_id));
  }
  // Halving under doubling, or both at the rounding floor.
  constexpr double floor = 1e-11;
  const bool halves = fine.max_residual <= 0.5 * coarse.max_residual ||
                      (fine.max_residual < floor && coarse.max_residual < floor);
  auto r = check_row(id, "halving_or_floor (fine/coarse)", halves ? 1.0 : 0.0, 1.0, 0.0);
  r.value = coarse.max_residual > 0.0 ? fine.max_residual / coarse.max_residual : 0.0;
  r.reference = 0.5;
  r.rel_error = std::max(coarse.max_residual, fine.max_residual);
  r.verdict = halves ? Verdict::Pass : Verdict::Fail;
  rows.push_back(r);
  return rows;
}

// ---------------------------------------------------------------------------
// 7. |x|^{-1} e^{it Delta} in three dimensions over radial data

namespace detail {

inline FreqData radial_shells(const std::vector<std::array<double, 3>>& shells, std::string label) {
  double rmax = 0.0;
  double smin = 1e300;
  for (const auto& s : shells) {
    rmax = std::max(rmax, s[0] + 8.6 * s[1]);
    smin = std::min(smin, s[1]);
  }
  auto h = [shells](double r) {
    double v = 0.0;
    for (const auto& s : shells) v += s[2] * std::exp(-0.5 * (r - s[0]) * (r - s[0]) / (s[1] * s[1]));
    return v;
  };
  return FreqData::from_spectrum(
      3, [h](const Vec3& xi) { return Complex(h(norm(xi, 3)), 0.0); }, {-rmax, -rmax, -rmax}, {rmax, rmax, rmax},
      8.6 / smin + 2.0, std::move(label));
}

}  // namespace detail

inline std::vector<ReportRow> simon_bound(const SuiteOptions& opt) {
  const std::string id = "simon_bound";
  std::vector<ReportRow> rows;
  const auto a3 = catalog("schrodinger", {}, 3);
  const CounterRng rng(opt.seed, 7);
  std::vector<FreqData> general;
  std::vector<FreqData> concentrating;
  for (int q = 0; q < 25; ++q) {
    std::vector<std::array<double, 3>> sh;
    for (int j = 0; j < 2; ++j) {
      const std::uint64_t c = 6 * q + 3 * j;
      sh.push_back({rng.uniform(c, 0.0, 2.5), rng.uniform(c + 1, 0.4, 1.0), rng.uniform(c + 2, 0.2, 1.0)});
    }
    general.push_back(detail::radial_shells(sh, "general" + std::to_string(q)));
  }
  // Thin shells on |xi| = 2.
  for (int q = 0; q < 25; ++q)
    concentrating.push_back(
        detail::radial_shells({{2.0, 0.6 * std::pow(0.9, q), 1.0}}, "shell" + std::to_string(q)));

  auto ratio = [&](const FreqData& phi3, std::string& gid) {
    const auto red = RadialReduction::make(phi3, a3);
    auto grid = detail::line_grid(red.line_symbol, red.line_data, 20.0, 0.02);
    grid.half_cell_offset = true;
    gid = grid.id();
    const auto prop = make_propagator(red.line_symbol, red.line_data, grid);
    TimeWindowPolicy pol;
    pol.throw_on_inadequate = false;
    const auto r = time_side_norm(prop, Weight::homogeneous(-1.0), Geometry::space_time(), pol);
    return std::sqrt(red.measure) * r.value / red.data_norm();
  };
  std::string gid;
  double sup = 0.0;
  double conc_min = 1e300;
  for (const auto& d : general) sup = std::max(sup, ratio(d, gid));
  for (const auto& d : concentrating) {
    const double r = ratio(d, gid);
    sup = std::max(sup, r);
    conc_min = std::min(conc_min, r);
  }
  const double c = std::sqrt(kPi);
  rows.push_back(bound_row(id, "empirical_constant (50 data) <= 1.02 sqrt(pi)", sup, 1.02 * c, true, gid));
  rows.push_back(bound_row(id, "concentrating_min >= 0.5 sqrt(pi)", conc_min, 0.5 * c, false, gid));
  rows.push_back(info_row(id, "empirical_constant / sqrt(pi)", sup / c));
  return rows;
}

// ---------------------------------------------------------------------------
// 8. <x>^{-1/2} on the shift: growth with the box

inline std::vector<ReportRow> critical_weight_growth(const SuiteOptions&) {
  const std::string id = "critical_weight_growth";
  std::vector<ReportRow> rows;
  const auto a = catalog("transport", {}, 1);
  const auto phi = FreqData::gaussian(1, 1.0);
  std::vector<double> sx;
  std::vector<double> ys;
  for (double L : {16.0, 64.0, 256.0}) {
    const double T = 0.98 * (L / 1.25 - phi.spatial_radius);
    const auto N = static_cast<std::size_t>(16.0 * L);
    const auto nt = static_cast<std::size_t>(std::ceil(2.0 * T / 0.05)) + 1;
    const auto grid = GridSpec::make(1, L, N, -T, T, nt);
    TimeWindowPolicy pol;
    pol.mode = TimeWindowPolicy::Mode::Plain;
    pol.throw_on_inadequate = false;
    const auto r = time_side_norm(make_propagator(a, phi, grid), Weight::bracket(-0.5), Geometry::space_time(), pol);
    const double ratio = r.value / phi.l2_norm();
    // int e^{-y^2} (asinh(y + T) - asinh(y - T)) dy / sqrt(pi)
    const double oracle = std::sqrt(
        quad::integrate([T](double y) { return std::exp(-y * y) * (std::asinh(y + T) - std::asinh(y - T)); }, -9.0,
                        9.0, 1e-15, 1e-13)
            .value /
        std::sqrt(kPi));
    rows.push_back(rel_row(id, "ratio_vs_quadrature L=" + detail::fmt(L), ratio, oracle, 1e-3, grid.id()));
    sx.push_back(std::sqrt(std::log(L)));
    ys.push_back(ratio);
  }
  rows.push_back(bound_row(id, "slope_vs_sqrt_log_L", detail::slope(sx, ys), 0.0, false));
  return rows;
}

// ---------------------------------------------------------------------------
// 9. Circle restriction of |D|^{1-s} |x|^{-s} f for radial Gaussians f

inline std::vector<ReportRow> restriction_growth(const SuiteOptions&) {
  const std::string id = "restriction_growth";
  std::vector<ReportRow> rows;
  const double s = 0.75;
  // 2 pi int_0^inf r^{1-s} e^{-r^2/(2w^2)} J_0(rho r) dr
  auto hankel = [s](double rho, double w) {
    const double R = 8.6 * w;
    const int pieces = 4 + static_cast<int>(std::ceil(rho * R / kPi));
    auto g = [&](double r) { return std::pow(r, 1.0 - s) * std::exp(-0.5 * r * r / (w * w)) * bessel_j(0.0, rho * r); };
    double total = 0.0;
    for (int p = 0; p < pieces; ++p)
      total += quad::integrate(g, R * p / pieces, R * (p + 1) / pieces, 1e-14, 1e-10).value;
    return kTwoPi * total;
  };
  std::vector<double> lx;
  std::vector<double> ly;
  for (int k = 0; k <= 8; ++k) {
    const double rho = 0.5 * std::pow(2.0, 0.5 * k);
    double best = 0.0;
    for (int j = -16; j <= 16; ++j) {
      const double w = std::pow(2.0, 0.25 * j);
      const double F = hankel(rho, w);
      const auto phi = FreqData::from_spectrum(
          2, [F, rho, s](const Vec3&) { return Complex(std::pow(rho, 1.0 - s) * F, 0.0); }, {-rho, -rho, 0},
          {rho, rho, 0}, 1.0, "radial");
      const double fnorm = std::sqrt(kPi) * w;
      best = std::max(best, restriction_norm(phi, rho, 4) / fnorm);
    }
    lx.push_back(std::log(rho));
    ly.push_back(std::log(best));
  }
  rows.push_back(check_row(id, "slope_log_sup_ratio_vs_log_rho", detail::slope(lx, ly), 0.5, 0.05));
  return rows;
}

// ---------------------------------------------------------------------------
// 10. Inhomogeneous model estimates

inline std::vector<ReportRow> inhomogeneous_models(const SuiteOptions& opt) {
  const std::string id = "inhomogeneous_models";
  std::vector<ReportRow> rows;
  DuhamelOptions dopt;
  dopt.richardson_tol = 1e-3;
  {
    const auto a = catalog("schrodinger", {}, 1);
    const auto g = GridSpec::make(1, 80.0, 512, 0.0, 4.0, 401);
    for (const auto& f : {modulated_gaussian(1, 2.0, 2.0),
                          traveling_bump(1, 2.0, 2.0, {-2, 0, 0}, {1, 0, 0}, {0.5, 0, 0}),
                          localized_noise(1, 2.0, 2.0, 6.0, 8, opt.seed)}) {
      const auto c = inhom_model_1d(a, f, g, {-2.5, 0.0, 2.5}, dopt);
      const auto d = inhom_model_1d(a, f, refined(g), {-2.5, 0.0, 2.5}, dopt);
      auto r = bound_row(id, "1d drift " + f.label, rel_diff(c.sup_ratio, d.sup_ratio), 0.1, true, d.grid_id);
      rows.push_back(r);
      rows.push_back(info_row(id, "1d sup_ratio " + f.label, d.sup_ratio, d.grid_id));
    }
  }
  {
    const auto g = GridSpec::make(2, 48.0, 192, 0.0, 2.0, 81);
    for (const auto& f : {modulated_gaussian(2, 3.0, 1.0),
                          traveling_bump(2, 3.0, 1.0, {-1, 1, 0}, {1, 0, 0}, {0, 0, 0}),
                          localized_noise(2, 3.0, 1.0, 3.0, 8, opt.seed)}) {
      const auto c = inhom_model_2d(2.0, f, g, {0.0, 3.0}, true, dopt);
      const auto d = inhom_model_2d(2.0, f, refined(g), {0.0, 3.0}, true, dopt);
      rows.push_back(bound_row(id, "2d drift " + f.label, rel_diff(c.sup_ratio, d.sup_ratio), 0.1, true, d.grid_id));
      rows.push_back(info_row(id, "2d sup_ratio " + f.label, d.sup_ratio, d.grid_id));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// 11. Bessel closed form and the homogeneous bracket

inline std::vector<ReportRow> bessel_and_bracket(const SuiteOptions&) {
  const std::string id = "bessel_and_bracket";
  std::vector<ReportRow> rows;
  for (double rho : {1.0, 2.0, 5.0}) {
    const double exact = std::sqrt(2.0 / (kPi * rho)) * std::sin(rho);
    rows.push_back(check_row(id, "J_1/2 rho=" + detail::fmt(rho), bessel_j(0.5, rho), exact, 1e-8));
  }
  for (auto [m, n] : {std::pair{2.0, 3}, std::pair{1.0, 3}, std::pair{2.0, 5}, std::pair{3.0, 4}}) {
    const auto r = walther_constant(Weight::homogeneous(-1.0), Smoother::power(0.5 * (m - 2.0)),
                                    catalog("power", {m}, 3), n, {0.5, 1.0, 3.0});
    const std::string tag = "m=" + detail::fmt(m) + " n=" + std::to_string(n);
    rows.push_back(rel_row(id, "sup_bracket " + tag, r.sup_bracket, 1.0 / (m * (n - 2)), 1e-4));
    rows.push_back(info_row(id, "calibrated_constant " + tag, r.constant));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// 12. Time-dependent coefficient c(t) = 1 + t^2

inline std::vector<ReportRow> time_dependent_factor(const SuiteOptions&) {
  const std::string id = "time_dependent_factor";
  std::vector<ReportRow> rows;
  const auto a = catalog("schrodinger", {}, 1);
  const auto sigma = Smoother::power(0.5);
  const auto phi = FreqData::gaussian(1, 1.0, {0.3, 0, 0}, {0.8, 0, 0});
  TimeCoefficient c;
  c.c = [](double t) { return 1.0 + t * t; };
  c.primitive_closed = [](double t) { return t + t * t * t / 3.0; };
  const double Cend = c.primitive(2.0);
  const Vec3 x{0.5, 0.0, 0.0};
  const std::size_t nt = 8001;
  const auto g1 = GridSpec::make(1, 128.0, 2048, 0.0, 2.0, nt);
  const auto p1 = make_timedep_propagator(c, a, phi, g1, &sigma);
  const auto v1 = p1.sample_points({x});
  std::vector<double> f1(nt);
  for (std::size_t k = 0; k < nt; ++k) f1[k] = c(g1.time(k)) * std::norm(v1[k]);
  const double lhs = std::sqrt(quad::trapezoid(f1, g1.dt()));
  const auto g2 = GridSpec::make(1, 128.0, 2048, 0.0, Cend, nt);
  const auto p2 = make_propagator(a, phi, g2, &sigma);
  const auto v2 = p2.sample_points({x});
  std::vector<double> f2(nt);
  for (std::size_t k = 0; k < nt; ++k) f2[k] = std::norm(v2[k]);
  const double rhs = std::sqrt(quad::trapezoid(f2, g2.dt()));
  rows.push_back(rel_row(id, "weighted_norm_vs_autonomous x=0.5", lhs, rhs, 1e-3, g1.id()));
  return rows;
}

// ---------------------------------------------------------------------------
// 13. Invariant estimate for two non-dispersive symbols

inline std::vector<ReportRow> nondispersive_invariant(const SuiteOptions&) {
  const std::string id = "nondispersive_invariant";
  std::vector<ReportRow> rows;
  const double s = 0.6;
  // Gaussians of width 2 with the essential support cut at 6 standard
  // deviations; momenta keep the bulk off the set where grad a vanishes.
  std::vector<FreqData> fam;
  for (const Vec3& k : {Vec3{1.5, 1.0, 0}, Vec3{-1.0, 1.5, 0}, Vec3{1.2, -1.2, 0}}) {
    auto phi = FreqData::gaussian(2, 2.0, {0, 0, 0}, k);
    for (int j = 0; j < 2; ++j) {
      phi.support_lo[j] = k[j] - 3.0;
      phi.support_hi[j] = k[j] + 3.0;
    }
    phi.spatial_radius = 12.0;
    fam.push_back(phi);
  }
  // Escaping packets leave int <x>^{-2s} |u|^2 dx ~ |t|^{-2s}.
  TimeWindowPolicy pol;
  pol.mode = TimeWindowPolicy::Mode::PowerTail;
  pol.tail_exponent = 2.0 * s;
  pol.throw_on_inadequate = false;
  for (const std::string name : {"nondisp_xy", "shifted_parabola"}) {
    const auto a = std::make_shared<const SymbolSpec>(catalog(name, {}, 2));
    const auto sigma = Smoother::gradient_power(a, 0.5);
    std::vector<double> sups;
    std::string gid;
    for (double L : {40.0, 80.0}) {
      auto grid_for = [&](const FreqData& phi) {
        const double speed = max_grad_over_box(*a, 2, phi.support_lo, phi.support_hi);
        const double T = 0.98 * (L / 1.25 - phi.spatial_radius) / speed;
        const double ext = std::max(phi.support_extent(0), phi.support_extent(1));
        const auto N = static_cast<std::size_t>(8 * std::ceil(1.02 * 4.0 * ext * L / kPi / 8.0));
        const auto nt = static_cast<std::size_t>(std::ceil(2.0 * T / 0.1)) + 1;
        const auto g = GridSpec::make(2, L, N, -T, T, nt);
        gid = g.id();
        return g;
      };
      const auto ec = empirical_constant(*a, sigma, Weight::bracket(-s), fam, grid_for, Geometry::space_time(), pol);
      sups.push_back(ec.sup);
      rows.push_back(info_row(id, name + " constant L=" + detail::fmt(L), ec.sup, gid));
    }
    rows.push_back(bound_row(id, name + " finite", std::isfinite(sups[1]) && sups[1] > 0.0 ? 1.0 : 0.0, 1.0, false));
    rows.push_back(bound_row(id, name + " drift_under_doubling", rel_diff(sups[0], sups[1]), 0.1, true, gid));
  }
  return rows;
}

// ---------------------------------------------------------------------------

inline std::vector<Criterion> core_criteria() {
  return {
      {1, "pointwise_oracle", "time-side norm at x in {0, 1, -2} against 0.37557", "stated value drops the cross term",
       pointwise_oracle},
      {2, "constancy_identity", "|D|^{1/2} e^{itD^2} norm equals ||phi||/sqrt(2)", "", constancy_identity},
      {3, "order_change", "m=2 against l=1 on half-line data, 1-D and 2-D", "", order_change},
      {4, "relativistic_equivalence", "e^{it<D>} against sqrt(2) <D>^{1/2} e^{itD^2}", "", relativistic_equivalence},
      {5, "comparison_certificates", "A = m^{-1/2} with equality", "", comparison_certificates},
      {6, "egorov_intertwining", "elliptic reduction residual and refinement", "", egorov_intertwining},
      {7, "simon_bound", "|x|^{-1} e^{itDelta} on 50 radial data in R^3", "", simon_bound},
      {8, "critical_weight_growth", "<x>^{-1/2} on the shift grows with the box", "", critical_weight_growth},
      {9, "restriction_growth", "circle restriction grows like rho^{1/2}", "", restriction_growth},
      {10, "inhomogeneous_models", "inhomogeneous ratios stable under refinement", "", inhomogeneous_models},
      {11, "bessel_and_bracket", "J_{1/2} and the homogeneous bracket", "", bessel_and_bracket},
      {12, "time_dependent_factor", "c(t) = 1 + t^2 weighted norm against [0, C(2)]", "", time_dependent_factor},
      {13, "nondispersive_invariant", "invariant constants stable under domain doubling", "", nondispersive_invariant},
  };
}

}  // namespace dispersmooth::harness

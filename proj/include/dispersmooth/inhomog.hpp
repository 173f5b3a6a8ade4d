#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "dispersmooth/comparison.hpp"
#include "dispersmooth/engine.hpp"
#include "dispersmooth/rng.hpp"

namespace dispersmooth {

// ---------------------------------------------------------------------------
// Forcing families. Time profile b(tau) = sin^2(pi tau / T) on [0, T].

namespace detail {

inline double pulse(double tau, double T) {
  if (tau < 0.0 || tau > T) return 0.0;
  const double s = std::sin(kPi * tau / T);
  return s * s;
}

inline void set_box(ForcingSpec& f, double center_lo, double center_hi, double cut) {
  for (int j = 0; j < f.dim; ++j) {
    f.support_lo[j] = center_lo - cut;
    f.support_hi[j] = center_hi + cut;
  }
}

}  // namespace detail

/// F(tau, x) = b(tau) cos(omega tau) exp(-|x|^2 / (2 s^2)).
inline ForcingSpec modulated_gaussian(int dim, double width, double T, double omega = 3.0) {
  ForcingSpec f;
  f.dim = dim;
  const double pref = std::pow(kTwoPi * width * width, 0.5 * dim);
  f.spectrum = [dim, width, T, omega, pref](double tau, const Vec3& xi) {
    const double b = detail::pulse(tau, T);
    if (b == 0.0) return Complex{};
    return Complex(b * std::cos(omega * tau) * pref * std::exp(-0.5 * width * width * dot(xi, xi, dim)), 0.0);
  };
  detail::set_box(f, 0.0, 0.0, 8.6 / width);
  f.spatial_radius = 8.6 * width;
  f.t_end = T;
  f.label = "modulated_gaussian";
  return f;
}

/// F(tau, x) = b(tau) exp(-|x - x0 - v tau|^2 / (2 s^2)) e^{i k0 . x}.
inline ForcingSpec traveling_bump(int dim, double width, double T, const Vec3& x0, const Vec3& v, const Vec3& k0) {
  ForcingSpec f;
  f.dim = dim;
  const double pref = std::pow(kTwoPi * width * width, 0.5 * dim);
  f.spectrum = [dim, width, T, x0, v, k0, pref](double tau, const Vec3& xi) {
    const double b = detail::pulse(tau, T);
    if (b == 0.0) return Complex{};
    double q = 0.0;
    double ph = 0.0;
    for (int j = 0; j < dim; ++j) {
      const double d = xi[j] - k0[j];
      q += d * d;
      ph -= d * (x0[j] + v[j] * tau);
    }
    return b * pref * std::exp(-0.5 * width * width * q) * std::polar(1.0, ph);
  };
  double klo = std::numeric_limits<double>::infinity();
  double khi = -klo;
  for (int j = 0; j < dim; ++j) {
    klo = std::min(klo, k0[j]);
    khi = std::max(khi, k0[j]);
  }
  detail::set_box(f, klo, khi, 8.6 / width);
  f.spatial_radius = norm(x0, dim) + norm(v, dim) * T + 8.6 * width;
  f.t_end = T;
  f.label = "traveling_bump";
  return f;
}

/// Sum of `count` Gaussian packets of width s at random positions in the ball
/// of radius `spread`, with random complex amplitudes and random temporal
/// frequencies in [0, 6]; spectrum localized to |xi| <~ 8.6 / s.
inline ForcingSpec localized_noise(int dim, double width, double T, double spread, int count = 8,
                                   std::uint64_t seed = kDefaultSeed) {
  struct Packet {
    Vec3 pos{0.0, 0.0, 0.0};
    Complex amp;
    double omega = 0.0;
  };
  const CounterRng rng(seed, 101);
  std::vector<Packet> ps(count);
  std::uint64_t c = 0;
  for (auto& p : ps) {
    for (int j = 0; j < dim; ++j) p.pos[j] = rng.uniform(c++, -spread, spread);
    p.amp = Complex(rng.normal(c), rng.normal(c + 1));
    c += 2;
    p.omega = rng.uniform(c++, 0.0, 6.0);
  }
  ForcingSpec f;
  f.dim = dim;
  const double pref = std::pow(kTwoPi * width * width, 0.5 * dim);
  f.spectrum = [dim, width, T, pref, ps](double tau, const Vec3& xi) {
    const double b = detail::pulse(tau, T);
    if (b == 0.0) return Complex{};
    const double env = b * pref * std::exp(-0.5 * width * width * dot(xi, xi, dim));
    Complex s{};
    for (const auto& p : ps) s += p.amp * std::polar(1.0, p.omega * tau - dot(xi, p.pos, dim));
    return env * s;
  };
  detail::set_box(f, 0.0, 0.0, 8.6 / width);
  f.spatial_radius = spread * std::sqrt(static_cast<double>(dim)) + 8.6 * width;
  f.t_end = T;
  f.label = "localized_noise";
  return f;
}

/// F^ set to zero where xi_axis < 0.
inline ForcingSpec positive_part(const ForcingSpec& f, int axis) {
  ForcingSpec g = f;
  auto base = f.spectrum;
  g.spectrum = [base, axis](double tau, const Vec3& xi) { return xi[axis] < 0.0 ? Complex{} : base(tau, xi); };
  g.support_lo[axis] = std::max(0.0, g.support_lo[axis]);
  g.label = f.label + ":pos";
  return g;
}

// ---------------------------------------------------------------------------
// Ratio reports

struct InhomRow {
  std::string forcing;
  double coordinate = 0.0;  // x (1-D) or y (2-D)
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct InhomReport {
  std::vector<InhomRow> rows;
  double sup_ratio = 0.0;
  double rhs = 0.0;
  double richardson = 0.0;      // Duhamel tau-quadrature estimate
  double rhs_edge_fraction = 0.0;  // share of the x-integral from the outer 10% of the box
  std::string grid_id;

  void write_csv(std::ostream& os) const {
    os.precision(12);
    for (const auto& r : rows) os << r.forcing << "," << r.coordinate << "," << r.lhs << "," << r.rhs << "," << r.ratio << "\n";
  }
};

namespace detail {

// int ||F(., x_perp, x_axis)||_{L^2(t x x_perp)} dx_axis over the box, with the
// share of the outer 10% of the box along `axis`.
inline std::pair<double, double> forcing_mixed_norm(const ForcingSpec& F, const GridSpec& grid, int axis) {
  const std::size_t n = grid.points();
  const auto fac = synthesis_factors(grid);
  const std::size_t na = grid.n[axis];
  std::vector<double> per_line(grid.nt * na, 0.0);
  std::vector<Vec3> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = grid.freq_point(i);
  double perp_cell = 1.0;
  for (int j = 0; j < grid.dim; ++j)
    if (j != axis) perp_cell *= grid.dx(j);
  parallel_chunks(grid.nt, 4, [&](std::size_t b, std::size_t e) {
    std::vector<Complex> buf(n);
    for (std::size_t k = b; k < e; ++k) {
      const double tau = grid.time(k);
      for (std::size_t i = 0; i < n; ++i) buf[i] = F.spectrum(tau, nodes[i]);
      synthesize(buf, grid, fac);
      for (std::size_t i = 0; i < n; ++i) per_line[k * na + grid.unravel(i)[axis]] += std::norm(buf[i]) * perp_cell;
    }
  });
  const double dt = grid.dt();
  double total = 0.0;
  double edge = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    double s = 0.0;
    for (std::size_t k = 0; k < grid.nt; ++k) s += (k == 0 || k + 1 == grid.nt ? 0.5 : 1.0) * per_line[k * na + a];
    const double v = std::sqrt(s * dt) * grid.dx(axis);
    total += v;
    if (std::abs(grid.x(axis, a)) > 0.9 * grid.half_extent[axis]) edge += v;
  }
  return {total, total > 0.0 ? edge / total : 0.0};
}

}  // namespace detail

/// ||a'(D) int_0^t e^{i(t-tau)a(D)} F(tau) dtau||_{L^2(t)} at each x sample
/// against int ||F(., x)||_{L^2(t)} dx; n = 1, a homogeneous.
inline InhomReport inhom_model_1d(const SymbolSpec& a, const ForcingSpec& F, const GridSpec& grid,
                                  const std::vector<double>& xs, DuhamelOptions opt = {}) {
  if (a.dim != 1 || grid.dim != 1 || F.dim != 1) throw Error(ErrorKind::Dimension, "inhom_model_1d is one-dimensional");
  if (!a.flags.homogeneous) throw Error(ErrorKind::Hypothesis, "inhom_model_1d needs a homogeneous symbol");
  std::vector<std::size_t> idx;
  for (double x : xs) {
    const std::size_t i = grid.nearest_x(0, x);
    if (std::abs(grid.x(0, i) - x) > 1e-9 * (1.0 + std::abs(x)))
      throw Error(ErrorKind::InvalidArgument, "x sample is not a grid node", x);
    idx.push_back(i);
  }
  const auto aptr = std::make_shared<const SymbolSpec>(a);
  const Smoother deriv = Smoother::partial(aptr, 0);
  opt.sigma = &deriv;
  const DuhamelSolver solver(a, F, grid, opt);
  std::vector<double> g(grid.nt * idx.size());
  InhomReport rep;
  rep.grid_id = grid.id();
  rep.richardson = solver.run([&](std::size_t k, std::span<const Complex> s) {
    for (std::size_t p = 0; p < idx.size(); ++p) g[k * idx.size() + p] = std::norm(s[idx[p]]);
  });
  const auto [rhs, edge] = detail::forcing_mixed_norm(F, grid, 0);
  rep.rhs = rhs;
  rep.rhs_edge_fraction = edge;
  TimeWindowPolicy plain;
  plain.mode = TimeWindowPolicy::Mode::Plain;
  plain.throw_on_inadequate = false;
  for (std::size_t p = 0; p < idx.size(); ++p) {
    std::vector<double> gp(grid.nt);
    for (std::size_t k = 0; k < grid.nt; ++k) gp[k] = g[k * idx.size() + p];
    InhomRow r;
    r.forcing = F.label;
    r.coordinate = xs[p];
    r.lhs = window_norm(gp, grid, plain).value;
    r.rhs = rhs;
    r.ratio = rhs > 0.0 ? r.lhs / rhs : 0.0;
    rep.sup_ratio = std::max(rep.sup_ratio, r.ratio);
    rep.rows.push_back(r);
  }
  return rep;
}

/// ||D_x|^{m-1} int_0^t e^{i(t-tau)|D_x|^{m-1} D_y} F dtau||_{L^2(t x x)} at each y
/// against int ||F(., ., y)||_{L^2(t x x)} dy. Axis 0 carries y, axis 1 carries x.
inline InhomReport inhom_model_2d(double m, const ForcingSpec& F, const GridSpec& grid, const std::vector<double>& ys,
                                  bool positive_only = false, DuhamelOptions opt = {}) {
  if (grid.dim != 2 || F.dim != 2) throw Error(ErrorKind::Dimension, "inhom_model_2d is two-dimensional");
  if (!(m > 0.0)) throw Error(ErrorKind::InvalidArgument, "m must be positive", m);
  const ForcingSpec G = positive_only ? positive_part(F, 1) : F;
  SymbolSpec a = catalog("nonelliptic_model", {std::max(m, 1.0)}, 2);
  if (m < 1.0) {
    a.eval = [m](const Vec3& xi) { return xi[0] * std::pow(std::abs(xi[1]), m - 1.0); };
    a.grad = nullptr;
    a.order = m;
  }
  const Smoother sig = axis_power(1, m - 1.0);
  opt.sigma = &sig;
  std::vector<std::size_t> rows_y;
  for (double y : ys) {
    const std::size_t i = grid.nearest_x(0, y);
    if (std::abs(grid.x(0, i) - y) > 1e-9 * (1.0 + std::abs(y)))
      throw Error(ErrorKind::InvalidArgument, "y sample is not a grid node", y);
    rows_y.push_back(i);
  }
  const DuhamelSolver solver(a, G, grid, opt);
  const std::size_t nx = grid.n[1];
  std::vector<double> g(grid.nt * rows_y.size());
  InhomReport rep;
  rep.grid_id = grid.id();
  rep.richardson = solver.run([&](std::size_t k, std::span<const Complex> s) {
    for (std::size_t p = 0; p < rows_y.size(); ++p) {
      double acc = 0.0;
      for (std::size_t j = 0; j < nx; ++j) acc += std::norm(s[rows_y[p] * nx + j]);
      g[k * rows_y.size() + p] = acc * grid.dx(1);
    }
  });
  const auto [rhs, edge] = detail::forcing_mixed_norm(G, grid, 0);
  rep.rhs = rhs;
  rep.rhs_edge_fraction = edge;
  TimeWindowPolicy plain;
  plain.mode = TimeWindowPolicy::Mode::Plain;
  plain.throw_on_inadequate = false;
  for (std::size_t p = 0; p < rows_y.size(); ++p) {
    std::vector<double> gp(grid.nt);
    for (std::size_t k = 0; k < grid.nt; ++k) gp[k] = g[k * rows_y.size() + p];
    InhomRow r;
    r.forcing = G.label;
    r.coordinate = ys[p];
    r.lhs = window_norm(gp, grid, plain).value;
    r.rhs = rhs;
    r.ratio = rhs > 0.0 ? r.lhs / rhs : 0.0;
    rep.sup_ratio = std::max(rep.sup_ratio, r.ratio);
    rep.rows.push_back(r);
  }
  return rep;
}

/// The same box with twice the points per axis and twice the time steps.
inline GridSpec refined(const GridSpec& g) {
  GridSpec r = g;
  for (int j = 0; j < g.dim; ++j) r.n[j] = 2 * g.n[j];
  r.nt = 2 * (g.nt - 1) + 1;
  return r;
}

}  // namespace dispersmooth

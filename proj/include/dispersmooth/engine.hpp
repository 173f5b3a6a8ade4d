#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dispersmooth/fft.hpp"
#include "dispersmooth/grid.hpp"
#include "dispersmooth/parallel.hpp"
#include "dispersmooth/quadrature.hpp"
#include "dispersmooth/symbols.hpp"
#include "dispersmooth/types.hpp"

namespace dispersmooth {

using SpectrumFn = std::function<Complex(const Vec3&)>;

/// Initial data given by its Fourier transform phi^(xi) with an essential
/// support box (|phi^| negligible outside) and the radius of a ball holding
/// essentially all of phi in physical space.
struct FreqData {
  int dim = 1;
  SpectrumFn spectrum;
  Vec3 support_lo{0.0, 0.0, 0.0};
  Vec3 support_hi{0.0, 0.0, 0.0};
  double spatial_radius = 0.0;
  std::string label;

  Complex operator()(const Vec3& xi) const { return spectrum(xi); }

  /// Largest |xi_j| over the support box, per axis.
  double support_extent(int j) const { return std::max(std::abs(support_lo[j]), std::abs(support_hi[j])); }

  double support_radius() const {
    Vec3 c{0.0, 0.0, 0.0};
    for (int j = 0; j < dim; ++j) c[j] = support_extent(j);
    return norm(c, dim);
  }

  /// ((2 pi)^{-n} int |phi^|^2)^{1/2} by the midpoint rule on the support box.
  double l2_norm(std::size_t per_axis = 0) const {
    if (per_axis == 0) per_axis = dim == 1 ? 8192 : (dim == 2 ? 512 : 128);
    std::size_t total = 1;
    Vec3 h{0.0, 0.0, 0.0};
    for (int j = 0; j < dim; ++j) {
      total *= per_axis;
      h[j] = (support_hi[j] - support_lo[j]) / static_cast<double>(per_axis);
    }
    double vol = 1.0;
    for (int j = 0; j < dim; ++j) vol *= h[j];
    constexpr std::size_t chunk = 4096;
    const std::size_t nchunks = (total + chunk - 1) / chunk;
    std::vector<double> partial(nchunks, 0.0);
    parallel_chunks(total, chunk, [&](std::size_t b, std::size_t e) {
      double s = 0.0;
      for (std::size_t i = b; i < e; ++i) {
        Vec3 xi{0.0, 0.0, 0.0};
        std::size_t rem = i;
        for (int j = dim - 1; j >= 0; --j) {
          xi[j] = support_lo[j] + (static_cast<double>(rem % per_axis) + 0.5) * h[j];
          rem /= per_axis;
        }
        s += std::norm(spectrum(xi));
      }
      partial[b / chunk] = s;
    });
    double s = 0.0;
    for (double p : partial) s += p;
    return std::sqrt(s * vol / std::pow(kTwoPi, dim));
  }

  /// Data with spectrum m(xi) phi^(xi); the support is unchanged.
  FreqData with_multiplier(std::function<double(const Vec3&)> m, std::string tag = "") const {
    FreqData out = *this;
    auto base = spectrum;
    out.spectrum = [base, m = std::move(m)](const Vec3& xi) {
      const double v = m(xi);
      return v == 0.0 ? Complex{} : v * base(xi);
    };
    if (!tag.empty()) out.label = label + "*" + tag;
    return out;
  }

  FreqData with_cutoff(const Cutoff& chi) const {
    return with_multiplier([chi](const Vec3& xi) { return chi(xi); }, "cutoff");
  }

  FreqData scaled_by(double c) const {
    FreqData out = *this;
    auto base = spectrum;
    out.spectrum = [base, c](const Vec3& xi) { return c * base(xi); };
    return out;
  }

  /// phi(x) = A exp(-|x - c|^2 / (2 w^2)) e^{i k.x}.
  static FreqData gaussian(int dim, double width, const Vec3& center = {0.0, 0.0, 0.0},
                           const Vec3& momentum = {0.0, 0.0, 0.0}, double amplitude = 1.0) {
    constexpr double cut = 8.6;  // exp(-cut^2/2) ~ 1e-16
    FreqData d;
    d.dim = dim;
    const double pref = amplitude * std::pow(kTwoPi * width * width, 0.5 * dim);
    d.spectrum = [dim, width, center, momentum, pref](const Vec3& xi) {
      double q = 0.0;
      double ph = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double d0 = xi[j] - momentum[j];
        q += d0 * d0;
        ph -= d0 * center[j];
      }
      return pref * std::exp(-0.5 * width * width * q) * Complex(std::cos(ph), std::sin(ph));
    };
    for (int j = 0; j < dim; ++j) {
      d.support_lo[j] = momentum[j] - cut / width;
      d.support_hi[j] = momentum[j] + cut / width;
    }
    d.spatial_radius = norm(center, dim) + cut * width;
    d.label = "gaussian";
    return d;
  }

  static FreqData from_spectrum(int dim, SpectrumFn fn, const Vec3& lo, const Vec3& hi, double spatial_radius,
                                std::string label = "custom") {
    FreqData d;
    d.dim = dim;
    d.spectrum = std::move(fn);
    d.support_lo = lo;
    d.support_hi = hi;
    d.spatial_radius = spatial_radius;
    d.label = std::move(label);
    return d;
  }
};

/// Forcing F(tau, x) given by its spatial Fourier transform F^(tau, xi).
struct ForcingSpec {
  int dim = 1;
  std::function<Complex(double, const Vec3&)> spectrum;
  Vec3 support_lo{0.0, 0.0, 0.0};
  Vec3 support_hi{0.0, 0.0, 0.0};
  double spatial_radius = 0.0;
  double t_end = 0.0;  // F vanishes for tau > t_end
  std::string label;

  double support_extent(int j) const { return std::max(std::abs(support_lo[j]), std::abs(support_hi[j])); }
};

/// Complex samples u(t_k, x_i), time-major.
struct Field {
  GridSpec grid;
  std::vector<Complex> data;
  std::string provenance;

  std::size_t points() const { return grid.points(); }
  Complex& at(std::size_t k, std::size_t i) { return data[k * points() + i]; }
  const Complex& at(std::size_t k, std::size_t i) const { return data[k * points() + i]; }
  std::span<Complex> slice(std::size_t k) { return {data.data() + k * points(), points()}; }
  std::span<const Complex> slice(std::size_t k) const { return {data.data() + k * points(), points()}; }

  double slice_l2(std::size_t k) const {
    double s = 0.0;
    for (const auto& v : slice(k)) s += std::norm(v);
    return std::sqrt(s * grid.cell_volume());
  }
};

// ---------------------------------------------------------------------------
// Resolution checks

struct ResolutionReport {
  double nyquist_margin = 0.0;    // min_j nyquist_j / (2 * support_j); >= 1 required
  double excursion_margin = 0.0;  // min_j L_j / (1.25 * (T max|grad a| + r)); >= 1 required
  double max_group_speed = 0.0;
};

inline double max_grad_over_box(const SymbolSpec& a, int dim, const Vec3& lo, const Vec3& hi) {
  constexpr int per = 33;
  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) total *= per;
  double mx = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    Vec3 xi{0.0, 0.0, 0.0};
    std::size_t rem = i;
    for (int j = dim - 1; j >= 0; --j) {
      xi[j] = lo[j] + (hi[j] - lo[j]) * static_cast<double>(rem % per) / (per - 1.0);
      rem /= per;
    }
    double g = 0.0;
    try {
      g = a.grad_norm(xi);
    } catch (const Error&) {
      continue;
    }
    if (std::isfinite(g)) mx = std::max(mx, g);
  }
  return mx;
}

inline ResolutionReport check_resolution(const SymbolSpec& a, int dim, const Vec3& lo, const Vec3& hi,
                                         double spatial_radius, const GridSpec& grid, double time_reach,
                                         bool throw_on_failure = true) {
  if (grid.dim != dim || a.dim != dim) throw Error(ErrorKind::Dimension, "grid, symbol and data dimensions differ");
  ResolutionReport r;
  r.nyquist_margin = std::numeric_limits<double>::infinity();
  r.excursion_margin = std::numeric_limits<double>::infinity();
  r.max_group_speed = max_grad_over_box(a, dim, lo, hi);
  for (int j = 0; j < dim; ++j) {
    const double ext = std::max(std::abs(lo[j]), std::abs(hi[j]));
    if (ext > 0.0) r.nyquist_margin = std::min(r.nyquist_margin, grid.nyquist(j) / (2.0 * ext));
    const double need = 1.25 * (time_reach * r.max_group_speed + spatial_radius);
    if (need > 0.0) r.excursion_margin = std::min(r.excursion_margin, grid.half_extent[j] / need);
  }
  if (throw_on_failure) {
    if (r.nyquist_margin < 1.0)
      throw Error(ErrorKind::Underresolved, "Nyquist frequency below twice the data support", r.nyquist_margin);
    if (r.excursion_margin < 1.0)
      throw Error(ErrorKind::Underresolved, "spatial box smaller than 1.25x the wave-packet excursion",
                  r.excursion_margin);
  }
  return r;
}

inline ResolutionReport check_resolution(const SymbolSpec& a, const FreqData& phi, const GridSpec& grid,
                                         bool throw_on_failure = true) {
  const double reach = std::max(std::abs(grid.t0), std::abs(grid.t1));
  return check_resolution(a, phi.dim, phi.support_lo, phi.support_hi, phi.spatial_radius, grid, reach,
                          throw_on_failure);
}

// ---------------------------------------------------------------------------
// Spectral sampling and synthesis

/// Per-mode synthesis factor so that backward FFT of factor * g^ gives
/// (2 pi)^{-n} sum_k g^(xi_k) e^{i x_i . xi_k} dxi^n at the grid nodes.
inline std::vector<Complex> synthesis_factors(const GridSpec& grid) {
  const std::size_t total = grid.points();
  std::vector<Complex> f(total);
  const double pref = grid.freq_cell_volume() / std::pow(kTwoPi, grid.dim);
  const double off = grid.half_cell_offset ? 0.5 : 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    const auto idx = grid.unravel(i);
    double ph = 0.0;
    long parity = 0;
    for (int j = 0; j < grid.dim; ++j) {
      const long kappa = grid.freq_index(j, idx[j]);
      parity += kappa;
      ph += off * grid.dx(j) * grid.xi(j, idx[j]);
    }
    const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
    f[i] = sign * pref * Complex(std::cos(ph), std::sin(ph));
  }
  return f;
}

/// phi^ sampled at the FFT-ordered frequency nodes, times sigma when given.
inline std::vector<Complex> sample_spectrum(const FreqData& phi, const GridSpec& grid,
                                            const Smoother* sigma = nullptr) {
  const std::size_t total = grid.points();
  std::vector<Complex> g(total);
  parallel_chunks(total, 4096, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Vec3 xi = grid.freq_point(i);
      Complex v = phi(xi);
      if (sigma && v != Complex{}) {
        const double s = (*sigma)(xi);
        v *= std::isfinite(s) ? s : 0.0;
      }
      g[i] = v;
    }
  });
  return g;
}

inline std::vector<double> sample_symbol(const SymbolSpec& a, const GridSpec& grid) {
  const std::size_t total = grid.points();
  std::vector<double> v(total);
  parallel_chunks(total, 4096, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) v[i] = a(grid.freq_point(i));
  });
  return v;
}

/// Spatial samples from spectral samples (in place).
inline void synthesize(std::span<Complex> buf, const GridSpec& grid, const std::vector<Complex>& factors) {
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= factors[i];
  fft::transform(buf, grid.fft_dims(), fft::Direction::Backward);
}

/// Spectral samples g^(xi_k) ~ sum_i u_i e^{-i x_i xi_k} dx^n from spatial
/// samples (in place); the exact inverse of synthesize.
inline void analyze(std::span<Complex> buf, const GridSpec& grid, const std::vector<Complex>& factors) {
  fft::transform(buf, grid.fft_dims(), fft::Direction::Forward);
  const double inv = 1.0 / static_cast<double>(grid.points());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= inv / factors[i];
}

/// Applies the Fourier multiplier m(D) to one spatial slice (in place).
inline void apply_multiplier(std::span<Complex> buf, const GridSpec& grid, const std::vector<double>& m) {
  fft::transform(buf, grid.fft_dims(), fft::Direction::Forward);
  const double inv = 1.0 / static_cast<double>(grid.points());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= m[i] * inv;
  fft::transform(buf, grid.fft_dims(), fft::Direction::Backward);
}

inline std::vector<double> sample_smoother(const Smoother& sigma, const GridSpec& grid) {
  std::vector<double> m(grid.points());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double v = sigma(grid.freq_point(i));
    m[i] = std::isfinite(v) ? v : 0.0;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Propagation

/// Generates solution slices u(t_k, .) = F^{-1}[e^{i Theta(t_k) a(xi)} g^(xi)]
/// on a grid, where Theta(t) = t (autonomous) or C(t) (time coefficient).
/// Slices are produced in fixed chunks so results do not depend on the
/// worker count.
class Propagator {
 public:
  static constexpr std::size_t kChunk = 32;

  Propagator(const GridSpec& grid, std::vector<Complex> spectrum, std::vector<double> symbol,
             std::function<double(double)> theta = {})
      : grid_(grid), spec_(std::move(spectrum)), sym_(std::move(symbol)), theta_(std::move(theta)) {
    const auto fac = synthesis_factors(grid_);
    for (std::size_t i = 0; i < spec_.size(); ++i) spec_[i] *= fac[i];
  }

  const GridSpec& grid() const { return grid_; }

  double phase_time(double t) const { return theta_ ? theta_(t) : t; }

  /// Calls sink(k, slice) for every time index; sink must tolerate
  /// concurrent calls with distinct k.
  template <class Sink>
  void for_each_slice(Sink&& sink) const {
    const std::size_t n = spec_.size();
    const std::size_t nt = grid_.nt;
    const auto dims = grid_.fft_dims();
    parallel_chunks(nt, kChunk, [&](std::size_t b, std::size_t e) {
      std::vector<Complex> phase(n);
      std::vector<Complex> step(n);
      std::vector<Complex> buf(n);
      const bool recur = !theta_ && grid_.nt > 1;
      if (recur) {
        const double t = grid_.time(b);
        const double dt = grid_.dt();
        for (std::size_t i = 0; i < n; ++i) {
          phase[i] = std::polar(1.0, t * sym_[i]);
          step[i] = std::polar(1.0, dt * sym_[i]);
        }
      }
      for (std::size_t k = b; k < e; ++k) {
        if (!recur) {
          const double th = phase_time(grid_.time(k));
          for (std::size_t i = 0; i < n; ++i) phase[i] = std::polar(1.0, th * sym_[i]);
        } else if (k > b) {
          for (std::size_t i = 0; i < n; ++i) phase[i] *= step[i];
        }
        for (std::size_t i = 0; i < n; ++i) buf[i] = spec_[i] * phase[i];
        fft::transform(buf, dims, fft::Direction::Backward);
        sink(k, std::span<const Complex>(buf));
      }
    });
  }

  /// u(t_k, x) at arbitrary points by direct summation over modes.
  /// Returns values indexed [k * xs.size() + p].
  std::vector<Complex> sample_points(const std::vector<Vec3>& xs) const {
    const std::size_t n = spec_.size();
    const std::size_t np = xs.size();
    const std::size_t nt = grid_.nt;
    // Undo the grid-node factors: plain coefficients c_k = (2pi)^{-n} dxi^n g^_k.
    const double pref = grid_.freq_cell_volume() / std::pow(kTwoPi, grid_.dim);
    std::vector<Complex> coef(n * np);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 xi = grid_.freq_point(i);
      for (std::size_t p = 0; p < np; ++p) coef[p * n + i] = pref * raw(i) * std::polar(1.0, dot(xs[p], xi, grid_.dim));
    }
    std::vector<Complex> out(nt * np);
    parallel_chunks(nt, kChunk, [&](std::size_t b, std::size_t e) {
      std::vector<Complex> phase(n);
      std::vector<Complex> step(n);
      const bool recur = !theta_ && nt > 1;
      if (recur) {
        for (std::size_t i = 0; i < n; ++i) {
          phase[i] = std::polar(1.0, grid_.time(b) * sym_[i]);
          step[i] = std::polar(1.0, grid_.dt() * sym_[i]);
        }
      }
      for (std::size_t k = b; k < e; ++k) {
        if (!recur) {
          const double th = phase_time(grid_.time(k));
          for (std::size_t i = 0; i < n; ++i) phase[i] = std::polar(1.0, th * sym_[i]);
        } else if (k > b) {
          for (std::size_t i = 0; i < n; ++i) phase[i] *= step[i];
        }
        for (std::size_t p = 0; p < np; ++p) {
          Complex s{};
          const Complex* c = coef.data() + p * n;
          for (std::size_t i = 0; i < n; ++i) s += c[i] * phase[i];
          out[k * np + p] = s;
        }
      }
    });
    return out;
  }

  Field materialize(std::string provenance) const {
    Field f;
    f.grid = grid_;
    f.provenance = std::move(provenance);
    f.data.resize(grid_.nt * grid_.points());
    const std::size_t n = grid_.points();
    for_each_slice([&](std::size_t k, std::span<const Complex> s) {
      std::copy(s.begin(), s.end(), f.data.begin() + static_cast<std::ptrdiff_t>(k * n));
    });
    return f;
  }

 private:
  Complex raw(std::size_t i) const {
    if (factors_.empty()) factors_ = synthesis_factors(grid_);
    return spec_[i] / factors_[i];
  }

  GridSpec grid_;
  std::vector<Complex> spec_;
  std::vector<double> sym_;
  std::function<double(double)> theta_;
  mutable std::vector<Complex> factors_;
};

inline Propagator make_propagator(const SymbolSpec& a, const FreqData& phi, const GridSpec& grid,
                                  const Smoother* sigma = nullptr, bool check = true) {
  if (check) check_resolution(a, phi, grid);
  return Propagator(grid, sample_spectrum(phi, grid, sigma), sample_symbol(a, grid));
}

/// u(t, x) = (2 pi)^{-n} int e^{i(x.xi + t a(xi))} sigma(xi) phi^(xi) dxi on the grid.
inline Field evolve(const SymbolSpec& a, const FreqData& phi, const GridSpec& grid,
                    const std::optional<Smoother>& sigma = std::nullopt) {
  const auto p = make_propagator(a, phi, grid, sigma ? &*sigma : nullptr);
  return p.materialize("evolve");
}

inline Propagator make_timedep_propagator(const TimeCoefficient& c, const SymbolSpec& a, const FreqData& phi,
                                          const GridSpec& grid, const Smoother* sigma = nullptr) {
  c.validate(grid.t0, grid.t1);
  const double reach = std::max(std::abs(c.primitive(grid.t0)), std::abs(c.primitive(grid.t1)));
  check_resolution(a, phi.dim, phi.support_lo, phi.support_hi, phi.spatial_radius, grid, reach);
  // Tabulate C(t_k) once; the grid is fixed.
  auto table = std::make_shared<std::vector<double>>(grid.nt);
  for (std::size_t k = 0; k < grid.nt; ++k) (*table)[k] = c.primitive(grid.time(k));
  const double t0 = grid.t0;
  const double dt = grid.dt();
  auto theta = [table, t0, dt, c](double t) {
    if (dt > 0.0) {
      const double u = (t - t0) / dt;
      const long k = std::lround(u);
      if (std::abs(u - static_cast<double>(k)) < 1e-9 && k >= 0 && k < static_cast<long>(table->size()))
        return (*table)[static_cast<std::size_t>(k)];
    }
    return c.primitive(t);
  };
  return Propagator(grid, sample_spectrum(phi, grid, sigma), sample_symbol(a, grid), theta);
}

/// u(t, .) = e^{i C(t) a(D)} phi, the solution of i u_t + c(t) a(D) u = 0.
inline Field evolve_timedep(const TimeCoefficient& c, const SymbolSpec& a, const FreqData& phi,
                            const GridSpec& grid) {
  return make_timedep_propagator(c, a, phi, grid).materialize("evolve_timedep");
}

// ---------------------------------------------------------------------------
// Duhamel

struct DuhamelOptions {
  double richardson_tol = 1e-6;  // relative to the largest accumulated mode
  const Smoother* sigma = nullptr;
  bool check = true;
};

/// Streams slices of u(t) = -i int_0^t e^{i(t - tau) a(D)} F(tau) dtau on the
/// grid's time nodes (t0 must be 0). The tau integral uses cumulative Simpson
/// on the same nodes; the final value is checked against the rule on every
/// other node (Richardson).
class DuhamelSolver {
 public:
  DuhamelSolver(const SymbolSpec& a, const ForcingSpec& f, const GridSpec& grid, DuhamelOptions opt = {})
      : a_(a), f_(f), grid_(grid), opt_(opt) {
    if (grid.t0 != 0.0) throw Error(ErrorKind::InvalidArgument, "duhamel needs t0 = 0");
    if (grid.nt < 3) throw Error(ErrorKind::InvalidArgument, "duhamel needs at least 3 time nodes");
    if (opt.check)
      check_resolution(a, f.dim, f.support_lo, f.support_hi, f.spatial_radius, grid,
                       std::max(std::abs(grid.t1), f.t_end));
  }

  /// Calls sink(k, spatial slice) in increasing k (single-threaded in t,
  /// parallel over modes). Returns the Richardson error estimate.
  template <class Sink>
  double run(Sink&& sink) const {
    const std::size_t n = grid_.points();
    const std::size_t nt = grid_.nt;
    const double dt = grid_.dt();
    const auto sym = sample_symbol(a_, grid_);
    const auto fac = synthesis_factors(grid_);
    std::vector<Complex> freq(n);
    for (std::size_t i = 0; i < n; ++i) freq[i] = Complex(0.0, 0.0);
    std::vector<double> sig(n, 1.0);
    if (opt_.sigma) sig = sample_smoother(*opt_.sigma, grid_);
    std::vector<Vec3> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = grid_.freq_point(i);

    std::vector<Complex> h0(n), h1(n), h2(n);  // h_{k-2}, h_{k-1}, h_k
    std::vector<Complex> acc(n);               // Simpson sum up to the last even node
    std::vector<Complex> coarse(n);            // same rule with step 2 dt on even nodes
    std::vector<Complex> integral(n);
    std::vector<Complex> buf(n);
    std::vector<Complex> hist0(n), hist2(n);   // h at nodes 4j and 4j+2 for the coarse rule
    const std::size_t last4 = ((nt - 1) / 4) * 4;
    std::vector<Complex> fine_at_last4;

    auto h_at = [&](std::size_t k, std::vector<Complex>& out) {
      const double tau = grid_.time(k);
      parallel_chunks(n, 4096, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
          out[i] = std::polar(1.0, -tau * sym[i]) * f_.spectrum(tau, nodes[i]);
      });
    };

    for (std::size_t k = 0; k < nt; ++k) {
      std::swap(h0, h1);
      std::swap(h1, h2);
      h_at(k, h2);
      if (k == 0) {
        std::fill(acc.begin(), acc.end(), Complex{});
        std::fill(integral.begin(), integral.end(), Complex{});
        hist0 = h2;
        std::fill(coarse.begin(), coarse.end(), Complex{});
      } else if (k % 2 == 0) {
        for (std::size_t i = 0; i < n; ++i) acc[i] += dt / 3.0 * (h0[i] + 4.0 * h1[i] + h2[i]);
        integral = acc;
        if (k == last4) fine_at_last4 = acc;
        if (k % 4 == 0) {
          for (std::size_t i = 0; i < n; ++i) coarse[i] += 2.0 * dt / 3.0 * (hist0[i] + 4.0 * hist2[i] + h2[i]);
          hist0 = h2;
        } else {
          hist2 = h2;
        }
      } else {
        // Odd node: Simpson up to k-1 plus a third-order single interval.
        if (k == 1) {
          h_at(2, buf);
          for (std::size_t i = 0; i < n; ++i) integral[i] = dt / 12.0 * (5.0 * h1[i] + 8.0 * h2[i] - buf[i]);
        } else {
          for (std::size_t i = 0; i < n; ++i)
            integral[i] = acc[i] + dt / 12.0 * (-h0[i] + 8.0 * h1[i] + 5.0 * h2[i]);
        }
      }
      const double t = grid_.time(k);
      for (std::size_t i = 0; i < n; ++i)
        buf[i] = Complex(0.0, -1.0) * std::polar(1.0, t * sym[i]) * integral[i] * sig[i] * fac[i];
      fft::transform(buf, grid_.fft_dims(), fft::Direction::Backward);
      sink(k, std::span<const Complex>(buf));
    }
    // Richardson: fine vs coarse Simpson at the last node divisible by 4.
    if (last4 == 0) return 0.0;
    double err = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      err = std::max(err, std::abs(fine_at_last4[i] - coarse[i]) / 15.0);
      scale = std::max(scale, std::abs(fine_at_last4[i]));
    }
    const double rel = scale > 0.0 ? err / scale : 0.0;
    if (rel > opt_.richardson_tol)
      throw Error(ErrorKind::Quadrature, "Duhamel tau-quadrature not converged (Richardson estimate)", rel);
    return rel;
  }

  const GridSpec& grid() const { return grid_; }

 private:
  SymbolSpec a_;
  ForcingSpec f_;
  GridSpec grid_;
  DuhamelOptions opt_;
};

inline Field duhamel(const SymbolSpec& a, const ForcingSpec& f, const GridSpec& grid, DuhamelOptions opt = {}) {
  DuhamelSolver solver(a, f, grid, opt);
  Field out;
  out.grid = grid;
  out.provenance = "duhamel";
  const std::size_t n = grid.points();
  out.data.resize(grid.nt * n);
  solver.run([&](std::size_t k, std::span<const Complex> s) {
    std::copy(s.begin(), s.end(), out.data.begin() + static_cast<std::ptrdiff_t>(k * n));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Export

/// Flat little-endian binary: magic "DSMFIELD", u32 dim, u32 n[3], f64 L[3],
/// f64 t0, f64 t1, u64 nt, u8 offset flag, then nt * points (re, im) f64 pairs.
inline void write_binary(const Field& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  auto put = [&](const auto& v) { os.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
  static_assert(std::endian::native == std::endian::little, "binary export assumes a little-endian host");
  os.write("DSMFIELD", 8);
  put(static_cast<std::uint32_t>(f.grid.dim));
  for (int j = 0; j < kMaxDim; ++j) put(static_cast<std::uint32_t>(f.grid.n[j]));
  for (int j = 0; j < kMaxDim; ++j) put(f.grid.half_extent[j]);
  put(f.grid.t0);
  put(f.grid.t1);
  put(static_cast<std::uint64_t>(f.grid.nt));
  put(static_cast<std::uint8_t>(f.grid.half_cell_offset ? 1 : 0));
  os.write(reinterpret_cast<const char*>(f.data.data()),
           static_cast<std::streamsize>(f.data.size() * sizeof(Complex)));
}

inline Field read_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (std::string(magic, 8) != "DSMFIELD") throw Error(ErrorKind::Parse, "not a field dump: " + path);
  auto get = [&](auto& v) { is.read(reinterpret_cast<char*>(&v), sizeof(v)); };
  Field f;
  std::uint32_t dim = 0;
  get(dim);
  f.grid.dim = static_cast<int>(dim);
  for (int j = 0; j < kMaxDim; ++j) {
    std::uint32_t n = 0;
    get(n);
    f.grid.n[j] = n;
  }
  for (int j = 0; j < kMaxDim; ++j) get(f.grid.half_extent[j]);
  get(f.grid.t0);
  get(f.grid.t1);
  std::uint64_t nt = 0;
  get(nt);
  f.grid.nt = nt;
  std::uint8_t off = 0;
  get(off);
  f.grid.half_cell_offset = off != 0;
  f.data.resize(f.grid.nt * f.grid.points());
  is.read(reinterpret_cast<char*>(f.data.data()), static_cast<std::streamsize>(f.data.size() * sizeof(Complex)));
  if (!is) throw Error(ErrorKind::Parse, "truncated field dump: " + path);
  f.provenance = "file";
  return f;
}

/// One time slice as CSV rows: t, x1[, x2, x3], re, im.
inline void write_csv_slice(const Field& f, std::size_t k, std::ostream& os) {
  os << "t";
  for (int j = 0; j < f.grid.dim; ++j) os << ",x" << (j + 1);
  os << ",re,im\n";
  os << std::setprecision(17);
  const double t = f.grid.time(k);
  for (std::size_t i = 0; i < f.points(); ++i) {
    const Vec3 x = f.grid.space_point(i);
    os << t;
    for (int j = 0; j < f.grid.dim; ++j) os << ',' << x[j];
    const Complex v = f.at(k, i);
    os << ',' << v.real() << ',' << v.imag() << '\n';
  }
}

}  // namespace dispersmooth

#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "dispersmooth/parallel.hpp"
#include "dispersmooth/quadrature.hpp"
#include "dispersmooth/symbols.hpp"

namespace dispersmooth {

// ---------------------------------------------------------------------------
// Bessel functions from the integral representation
//   J_l(r) = r^l / (2^l Gamma(l + 1/2) Gamma(1/2)) int_{-1}^{1} e^{i r s} (1 - s^2)^{l - 1/2} ds

struct BesselEval {
  double order = 0.0;
  double rho = 0.0;
  double value = 0.0;
  double discarded_imag = 0.0;  // relative size of the dropped imaginary part
  enum class Method { Jacobi, Contour } method = Method::Jacobi;
};

namespace detail {

inline double bessel_prefactor(double l, double rho) {
  return std::exp(l * std::log(0.5 * rho) - std::lgamma(l + 0.5) - 0.5 * std::log(kPi));
}

// Gauss-Jacobi on the segment; accurate while the oscillation does not
// cancel the weight mass by many digits (rho below ~ l + 8).
inline BesselEval bessel_jacobi(double l, double rho) {
  const int n = 16 * ((2 * static_cast<int>(std::ceil(rho)) + static_cast<int>(std::ceil(l)) + 24 + 15) / 16);
  const auto rule = quad::gauss_jacobi(n, l - 0.5, l - 0.5);
  double re = 0.0;
  double im = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
    re += rule->weights[i] * std::cos(rho * rule->nodes[i]);
    im += rule->weights[i] * std::sin(rho * rule->nodes[i]);
    mass += rule->weights[i];
  }
  BesselEval e;
  e.order = l;
  e.rho = rho;
  e.method = BesselEval::Method::Jacobi;
  e.value = bessel_prefactor(l, rho) * re;
  e.discarded_imag = std::abs(im) / mass;
  return e;
}

// Same integral with the segment deformed onto the two vertical rays
// s = -1 + iu and s = 1 + iu; the pieces are complex conjugate and each is a
// generalized Gauss-Laguerre integral in rho u with weight (rho u)^{l-1/2} e^{-rho u}.
inline BesselEval bessel_contour(double l, double rho) {
  const double a = l - 0.5;
  const auto rule = quad::gauss_laguerre(64, a);
  Complex A{};
  for (std::size_t i = 0; i < rule->nodes.size(); ++i)
    A += rule->weights[i] * std::pow(Complex(rule->nodes[i] / rho, 2.0), a);
  // X = i e^{-i rho} rho^{-a-1} A; the integral is 2 Re X.
  const Complex X = Complex(0.0, 1.0) * std::polar(1.0, -rho) * A;
  BesselEval e;
  e.order = l;
  e.rho = rho;
  e.method = BesselEval::Method::Contour;
  e.value = 2.0 * X.real() * std::exp(-0.5 * std::log(rho) - l * std::log(2.0) - std::lgamma(l + 0.5) -
                                      0.5 * std::log(kPi));
  e.discarded_imag = 0.0;
  return e;
}

}  // namespace detail

inline BesselEval bessel_eval(double l, double rho) {
  if (!(l > -0.5)) throw Error(ErrorKind::InvalidArgument, "Bessel order must exceed -1/2", l);
  if (!(rho >= 0.0)) throw Error(ErrorKind::InvalidArgument, "Bessel argument must be >= 0", rho);
  if (rho == 0.0) {
    BesselEval e;
    e.order = l;
    e.value = l == 0.0 ? 1.0 : 0.0;
    return e;
  }
  auto e = rho < l + 8.0 ? detail::bessel_jacobi(l, rho) : detail::bessel_contour(l, rho);
  if (e.discarded_imag > 1e-12) throw Error(ErrorKind::Validation, "Bessel quadrature left an imaginary part", e.discarded_imag);
  return e;
}

inline double bessel_j(double l, double rho) { return bessel_eval(l, rho).value; }

// ---------------------------------------------------------------------------
// Best constants

inline double simon_constant(double m, int n) {
  if (n < 3) throw Error(ErrorKind::Dimension, "the constant is defined for n >= 3", n);
  if (!(m > 0.0)) throw Error(ErrorKind::InvalidArgument, "m must be positive", m);
  return std::sqrt(kTwoPi / (m * (n - 2)));
}

struct WaltherOptions {
  double horizon = 200.0;  // t = r rho beyond which the averaged envelope is used
  int k_max = 16;
};

struct WaltherResult {
  double constant = 0.0;          // calibrated: (2 pi)^{1/2} sup^{1/2}
  double printed_constant = 0.0;  // with the (2 pi)^{(n+1)/2} prefactor
  double sup_bracket = 0.0;
  double rho_star = 0.0;
  int k_star = 0;
  std::vector<double> rho;
  std::vector<std::vector<double>> brackets;  // [rho index][k]
};

namespace detail {

// int_0^inf J_nu(t)^2 h(t) dt with h(t) = w(t/rho)^2 t / rho^2, split at the
// horizon; beyond it J_nu^2 is replaced by its mean
// (1 + (4 nu^2 - 1) / (8 t^2)) / (pi t). Averaging the cut at T and T + pi/2
// cancels the leading boundary term of the oscillating part.
inline double bessel_square_integral(double nu, const std::function<double(double)>& h, double horizon) {
  auto g = [&](double t) {
    const double j = bessel_j(nu, t);
    return j * j * h(t);
  };
  // g ~ c t^p at 0 must have p > -1.
  const double g1 = g(1e-6);
  const double g2 = g(1e-7);
  if (g1 > 0.0 && g2 > 0.0 && std::log10(g1 / g2) <= -1.0 + 1e-3)
    throw Error(ErrorKind::Unbounded, "r-integral diverges at r = 0", nu);
  const double mu1 = 4.0 * nu * nu - 1.0;
  auto env = [&](double t) { return h(t) / (kPi * t) * (1.0 + mu1 / (8.0 * t * t)); };
  // h(t) / t ~ c t^q at infinity must have q < -1.
  const double e1 = env(1e6 * horizon);
  const double e2 = env(1e7 * horizon);
  if (e1 > 0.0 && e2 > 0.0 && std::log10(e2 / e1) >= -1.0 - 1e-3)
    throw Error(ErrorKind::Unbounded, "r-integral diverges at r = infinity", nu);
  double total = 0.0;
  const int segs = static_cast<int>(std::ceil(horizon));
  for (int s = 0; s < segs; ++s) {
    const double a = horizon * s / segs;
    const double b = horizon * (s + 1) / segs;
    total += quad::integrate(g, a, b, 1e-15, 1e-11).value;
  }
  auto tail = [&](double T) {
    return quad::integrate([&](double u) { return u == 0.0 ? 0.0 : env(T / u) * T / (u * u); }, 0.0, 1.0, 1e-15, 1e-11)
        .value;
  };
  const double T2 = horizon + 0.5 * kPi;
  const double quarter = quad::integrate(g, horizon, T2, 1e-15, 1e-11).value;
  return total + 0.5 * (tail(horizon) + quarter + tail(T2));
}

}  // namespace detail

/// C = (2 pi)^{1/2} (sup_{rho, k} rho sigma(rho)^2 / f'(rho) int_0^inf J_{n/2+k-1}(r rho)^2 w(r)^2 r dr)^{1/2}
/// over the rho grid and k <= k_max. f is radial; w and sigma are sampled on
/// the first axis.
inline WaltherResult walther_constant(const Weight& w, const Smoother& sigma, const SymbolSpec& f, int n,
                                      const std::vector<double>& rho_grid, WaltherOptions opt = {}) {
  if (n < 2) throw Error(ErrorKind::Dimension, "walther_constant needs n >= 2", n);
  if (!f.radial_profile) throw Error(ErrorKind::InvalidArgument, "walther_constant needs a radial profile");
  if (rho_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty rho grid");
  const auto& prof = *f.radial_profile;
  double prev = std::numeric_limits<double>::quiet_NaN();
  int dir = 0;
  for (double r : rho_grid) {
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "rho grid must be positive", r);
    if (prof.df(r) == 0.0) throw Error(ErrorKind::Hypothesis, "f' vanishes on the rho grid", r);
    const double v = prof.f(r);
    if (!std::isnan(prev)) {
      const int d = v > prev ? 1 : (v < prev ? -1 : 0);
      if (d == 0 || (dir != 0 && d != dir)) throw Error(ErrorKind::Hypothesis, "f is not injective on the rho grid", r);
      dir = d;
    }
    prev = v;
  }
  const int K = opt.k_max + 1;
  WaltherResult res;
  res.rho = rho_grid;
  res.brackets.assign(rho_grid.size(), std::vector<double>(K, 0.0));
  parallel_for(rho_grid.size() * K, [&](std::size_t idx) {
    const std::size_t i = idx / K;
    const int k = static_cast<int>(idx % K);
    const double rho = rho_grid[i];
    const double s = sigma(Vec3{rho, 0.0, 0.0});
    if (s == 0.0) return;
    const double nu = 0.5 * n + k - 1.0;
    auto h = [&](double t) {
      const double wv = w(Vec3{t / rho, 0.0, 0.0});
      return wv * wv * t / (rho * rho);
    };
    const double I = detail::bessel_square_integral(nu, h, opt.horizon);
    res.brackets[i][k] = rho * s * s / std::abs(prof.df(rho)) * I;
  });
  // Smallest k first, then smallest rho.
  double best = -1.0;
  for (int k = 0; k < K; ++k)
    for (std::size_t i = 0; i < rho_grid.size(); ++i)
      if (res.brackets[i][k] > best) {
        best = res.brackets[i][k];
        res.k_star = k;
        res.rho_star = rho_grid[i];
      }
  res.sup_bracket = best;
  if (best > 0.0) {
    std::size_t istar = 0;
    while (rho_grid[istar] != res.rho_star) ++istar;
    if (K >= 2 && !(res.brackets[istar][K - 1] < res.brackets[istar][K - 2]))
      throw Error(ErrorKind::Validation, "bracket not decreasing in k at k_max", res.brackets[istar][K - 1]);
  }
  res.constant = std::sqrt(kTwoPi * best);
  res.printed_constant = std::pow(kTwoPi, 0.5 * (n + 1)) * std::sqrt(best);
  return res;
}

// ---------------------------------------------------------------------------
// Table export

struct ConstantRow {
  std::string name;
  std::string params;
  double value = 0.0;
  std::string method;
  std::string sup_location;
};

inline void write_constants_csv(std::ostream& os, const std::vector<ConstantRow>& rows) {
  os << "name,params,value,method,sup_location\n";
  os.precision(17);
  for (const auto& r : rows)
    os << r.name << ",\"" << r.params << "\"," << r.value << "," << r.method << ",\"" << r.sup_location << "\"\n";
}

}  // namespace dispersmooth

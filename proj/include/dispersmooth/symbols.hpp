#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dispersmooth/grid.hpp"
#include "dispersmooth/quadrature.hpp"
#include "dispersmooth/types.hpp"

namespace dispersmooth {

using ScalarField = std::function<double(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;

/// Central-difference gradient with step (eps)^{1/3} (1 + |xi|) * scale.
inline Vec3 fd_gradient(const ScalarField& f, int dim, const Vec3& xi, double scale = 1.0) {
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + norm(xi, dim)) * scale;
  Vec3 g{0.0, 0.0, 0.0};
  for (int j = 0; j < dim; ++j) {
    Vec3 p = xi;
    Vec3 m = xi;
    p[j] += h;
    m[j] -= h;
    g[j] = (f(p) - f(m)) / (2.0 * h);
  }
  return g;
}

struct RadialProfile {
  std::function<double(double)> f;
  std::function<double(double)> df;
};

struct SymbolFlags {
  bool homogeneous = false;
  bool radial = false;
  bool elliptic = false;
};

/// A real dispersion relation a(xi) with its gradient and structural metadata.
struct SymbolSpec {
  std::string name;
  int dim = 1;
  double order = 0.0;
  ScalarField eval;
  VectorField grad;       // empty: finite-difference fallback
  ScalarField principal;  // positively homogeneous part, when known
  std::optional<RadialProfile> radial_profile;
  SymbolFlags flags;
  bool singular_origin = false;  // not differentiable at xi = 0

  double operator()(const Vec3& xi) const { return eval(xi); }

  Vec3 gradient(const Vec3& xi) const { return grad ? grad(xi) : fd_gradient(eval, dim, xi); }

  double partial(int j, const Vec3& xi) const { return gradient(xi)[j]; }

  double grad_norm(const Vec3& xi) const { return norm(gradient(xi), dim); }
};

using SymbolPtr = std::shared_ptr<const SymbolSpec>;

/// Looks up a named dispersion relation. dim = 0 picks the entry's natural
/// dimension.
inline SymbolSpec catalog(const std::string& name, const std::vector<double>& params = {}, int dim = 0);

inline std::vector<std::string> catalog_names();

// ---------------------------------------------------------------------------
// Smoothers, weights, cutoffs, time coefficients

enum class SmootherKind { Identity, Power, Bracket, Radial, GradientPower, GradientBracket, Partial, Custom };

/// Frequency multiplier sigma(xi). Power and gradient kinds are nonnegative;
/// Partial (d a / d xi_j) and Custom may carry a sign.
struct Smoother {
  SmootherKind kind = SmootherKind::Identity;
  double exponent = 0.0;
  int axis = 0;
  std::function<double(double)> radial_fn;
  SymbolPtr symbol;
  ScalarField custom;

  static Smoother identity() { return {}; }
  static Smoother power(double eta) { return of(SmootherKind::Power, eta); }
  static Smoother bracket(double eta) { return of(SmootherKind::Bracket, eta); }
  static Smoother radial(std::function<double(double)> fn) {
    Smoother s;
    s.kind = SmootherKind::Radial;
    s.radial_fn = std::move(fn);
    return s;
  }
  static Smoother gradient_power(SymbolPtr a, double eta) {
    Smoother s;
    s.kind = SmootherKind::GradientPower;
    s.exponent = eta;
    s.symbol = std::move(a);
    return s;
  }
  static Smoother gradient_bracket(SymbolPtr a, double eta) {
    Smoother s;
    s.kind = SmootherKind::GradientBracket;
    s.exponent = eta;
    s.symbol = std::move(a);
    return s;
  }
  static Smoother partial(SymbolPtr a, int axis) {
    Smoother s;
    s.kind = SmootherKind::Partial;
    s.axis = axis;
    s.symbol = std::move(a);
    return s;
  }
  static Smoother from(ScalarField fn) {
    Smoother s;
    s.kind = SmootherKind::Custom;
    s.custom = std::move(fn);
    return s;
  }

  bool is_identity() const { return kind == SmootherKind::Identity; }

  double operator()(const Vec3& xi) const {
    switch (kind) {
      case SmootherKind::Identity: return 1.0;
      case SmootherKind::Power: return signed_power(norm(xi, kMaxDim), exponent);
      case SmootherKind::Bracket: return std::pow(::dispersmooth::bracket(norm(xi, kMaxDim)), exponent);
      case SmootherKind::Radial: return radial_fn(norm(xi, kMaxDim));
      case SmootherKind::GradientPower: return signed_power(symbol->grad_norm(xi), exponent);
      case SmootherKind::GradientBracket: return std::pow(::dispersmooth::bracket(symbol->grad_norm(xi)), exponent);
      case SmootherKind::Partial: return symbol->partial(axis, xi);
      case SmootherKind::Custom: return custom(xi);
    }
    return 1.0;
  }

  Smoother scaled(double lambda) const {
    Smoother base = *this;
    return from([base, lambda](const Vec3& xi) { return lambda * base(xi); });
  }

 private:
  static Smoother of(SmootherKind kind, double eta) {
    Smoother s;
    s.kind = kind;
    s.exponent = eta;
    return s;
  }

  // r^eta with the convention 0^eta = 0 (eta > 0), 1 (eta = 0), +inf (eta < 0).
  static double signed_power(double r, double eta) {
    if (eta == 0.0) return 1.0;
    if (r == 0.0) return eta > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(r, eta);
  }
};

enum class WeightKind { Constant, Bracket, Homogeneous, Axis };

/// Spatial weight w(x).
struct Weight {
  WeightKind kind = WeightKind::Constant;
  double exponent = 0.0;
  double value = 1.0;
  int axis = 0;

  static Weight constant(double c = 1.0) { return {WeightKind::Constant, 0.0, c}; }
  static Weight bracket(double delta) { return {WeightKind::Bracket, delta}; }
  static Weight homogeneous(double delta) { return {WeightKind::Homogeneous, delta}; }
  static Weight axis_bracket(int j, double delta) { return {WeightKind::Axis, delta, 1.0, j}; }

  bool singular_at_origin() const { return kind == WeightKind::Homogeneous && exponent < 0.0; }

  double operator()(const Vec3& x) const {
    switch (kind) {
      case WeightKind::Constant: return value;
      case WeightKind::Bracket: return std::pow(::dispersmooth::bracket(norm(x, kMaxDim)), exponent);
      case WeightKind::Homogeneous: {
        const double r = norm(x, kMaxDim);
        if (exponent == 0.0) return 1.0;
        if (r == 0.0) {
          if (exponent < 0.0) throw Error(ErrorKind::Singular, "homogeneous weight sampled at x = 0");
          return 0.0;
        }
        return std::pow(r, exponent);
      }
      case WeightKind::Axis: return std::pow(::dispersmooth::bracket(x[axis]), exponent);
    }
    return 1.0;
  }
};

enum class CutoffKind { All, Cone, Ball, Annulus, HalfLine, Box };

/// Frequency cutoff chi with values in [0, 1]: 1 on the core, 0 off the
/// support, raised-cosine taper in between. Products compose factors.
class Cutoff {
 public:
  struct Term {
    CutoffKind kind = CutoffKind::All;
    Vec3 direction{0.0, 0.0, 1.0};
    double a = 0.0;      // half-angle, radius, inner radius, or unused
    double b = 0.0;      // outer radius
    double taper = 0.0;  // cone: fraction of half-angle; others: absolute width
    int axis = 0;
    double sign = 1.0;
    Vec3 lo{0.0, 0.0, 0.0};
    Vec3 hi{0.0, 0.0, 0.0};
    int dim = 1;
  };

  static Cutoff all() { return Cutoff{}; }

  static Cutoff cone(const Vec3& direction, double half_angle, double taper_fraction = 0.2) {
    Term t;
    t.kind = CutoffKind::Cone;
    const double r = norm(direction, kMaxDim);
    t.direction = scaled(direction, 1.0 / r);
    t.a = half_angle;
    t.taper = taper_fraction;
    return Cutoff{{t}};
  }
  static Cutoff ball(double radius, double taper = 0.0) {
    Term t;
    t.kind = CutoffKind::Ball;
    t.a = radius;
    t.taper = taper;
    return Cutoff{{t}};
  }
  static Cutoff annulus(double inner, double outer, double taper = 0.0) {
    Term t;
    t.kind = CutoffKind::Annulus;
    t.a = inner;
    t.b = outer;
    t.taper = taper;
    return Cutoff{{t}};
  }
  static Cutoff half_line(double sign = 1.0, double taper = 0.0, int axis = 0) {
    Term t;
    t.kind = CutoffKind::HalfLine;
    t.sign = sign >= 0.0 ? 1.0 : -1.0;
    t.taper = taper;
    t.axis = axis;
    return Cutoff{{t}};
  }
  static Cutoff box(int dim, const Vec3& lo, const Vec3& hi, double taper = 0.0) {
    Term t;
    t.kind = CutoffKind::Box;
    t.lo = lo;
    t.hi = hi;
    t.taper = taper;
    t.dim = dim;
    return Cutoff{{t}};
  }

  Cutoff operator*(const Cutoff& other) const {
    Cutoff c = *this;
    c.terms_.insert(c.terms_.end(), other.terms_.begin(), other.terms_.end());
    return c;
  }

  bool is_all() const {
    for (const auto& t : terms_)
      if (t.kind != CutoffKind::All) return false;
    return true;
  }

  const std::vector<Term>& terms() const { return terms_; }

  double operator()(const Vec3& xi) const {
    double v = 1.0;
    for (const auto& t : terms_) {
      v *= eval(t, xi);
      if (v == 0.0) return 0.0;
    }
    return v;
  }

 private:
  explicit Cutoff(std::vector<Term> terms = {}) : terms_(std::move(terms)) {}

  static double step_down(double r, double edge, double width) {
    // 1 for r <= edge - width, 0 for r >= edge.
    if (width <= 0.0) return r < edge ? 1.0 : 0.0;
    return 1.0 - raised_cosine((r - (edge - width)) / width);
  }
  static double step_up(double r, double edge, double width) {
    // 0 for r <= edge, 1 for r >= edge + width.
    if (width <= 0.0) return r > edge ? 1.0 : 0.0;
    return raised_cosine((r - edge) / width);
  }

  static double eval(const Term& t, const Vec3& xi) {
    switch (t.kind) {
      case CutoffKind::All: return 1.0;
      case CutoffKind::Cone: {
        const double r = norm(xi, kMaxDim);
        if (r == 0.0) return 0.0;
        const double c = std::clamp(dot(xi, t.direction, kMaxDim) / r, -1.0, 1.0);
        const double theta = std::acos(c);
        return step_down(theta, t.a, t.taper * t.a);
      }
      case CutoffKind::Ball: return step_down(norm(xi, kMaxDim), t.a, t.taper);
      case CutoffKind::Annulus: {
        const double r = norm(xi, kMaxDim);
        return step_up(r, t.a, t.taper) * step_down(r, t.b, t.taper);
      }
      case CutoffKind::HalfLine: return step_up(t.sign * xi[t.axis], 0.0, t.taper);
      case CutoffKind::Box: {
        double v = 1.0;
        for (int j = 0; j < t.dim; ++j)
          v *= step_up(xi[j], t.lo[j], t.taper) * step_down(xi[j], t.hi[j], t.taper);
        return v;
      }
    }
    return 1.0;
  }

  std::vector<Term> terms_;
};

/// Time coefficient c(t) of b(t, xi) = c(t) a(xi), with primitive C(0) = 0.
struct TimeCoefficient {
  std::function<double(double)> c;
  std::function<double(double)> primitive_closed;  // optional closed form
  double alpha = -std::numeric_limits<double>::infinity();
  double beta = std::numeric_limits<double>::infinity();

  double operator()(double t) const { return c(t); }

  double primitive(double t) const {
    if (primitive_closed) return primitive_closed(t);
    if (t == 0.0) return 0.0;
    return quad::integrate(c, 0.0, t, 1e-14, 1e-13).value;
  }

  /// Throws Hypothesis when c vanishes or changes sign inside (lo, hi).
  void validate(double lo, double hi) const {
    constexpr int samples = 2001;
    double first_sign = 0.0;
    for (int i = 1; i < samples - 1; ++i) {
      const double t = lo + (hi - lo) * i / (samples - 1.0);
      const double v = c(t);
      if (v == 0.0 || !std::isfinite(v))
        throw Error(ErrorKind::Hypothesis, "time coefficient vanishes inside the window", t);
      const double s = v > 0.0 ? 1.0 : -1.0;
      if (first_sign == 0.0) first_sign = s;
      if (s != first_sign) throw Error(ErrorKind::Hypothesis, "time coefficient changes sign inside the window", t);
    }
  }

  static TimeCoefficient constant(double value) {
    return {[value](double) { return value; }, [value](double t) { return value * t; }};
  }
};

// ---------------------------------------------------------------------------
// Classification

enum class Verdict { H, L, HL, NonDispersive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::H: return "H";
    case Verdict::L: return "L";
    case Verdict::HL: return "HL";
    case Verdict::NonDispersive: return "non-dispersive";
  }
  return "?";
}

struct ClassificationReport {
  double min_grad = 0.0;            // min |grad a| over the grid minus the origin
  Vec3 min_grad_at{0.0, 0.0, 0.0};
  double grad_at_origin = 0.0;
  double min_principal_grad = 0.0;  // min |grad a_m| over unit-sphere samples
  double min_l_ratio = 0.0;         // min |grad a| / <xi>^{m-1} over the grid
  std::vector<Vec3> zeros;          // refined gradient zeros away from the origin
  std::size_t zero_cells = 0;
  bool homogeneous_checked = false;
  bool h_holds = false;
  bool l_holds = false;
  bool hl_holds = false;
  bool degenerate_grid = false;
  Verdict verdict = Verdict::NonDispersive;
  std::string note;
};

inline ClassificationReport classify(const SymbolSpec& a, const FrequencyBox& grid);

struct GradientCheck {
  double max_deviation = 0.0;  // max |grad - FD| / (1 + |grad|) at the standard step
  double observed_order = 2.0; // log2 of the error ratio between steps h and h/2
  bool at_rounding_floor = true;
};

inline GradientCheck gradient_check(const SymbolSpec& a, const std::vector<Vec3>& samples);

}  // namespace dispersmooth

#include "dispersmooth/detail/symbols_impl.hpp"

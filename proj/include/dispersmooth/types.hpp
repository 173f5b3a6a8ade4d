#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dispersmooth {

using Real = double;
using Complex = std::complex<double>;

/// Problems are posed in at most three space dimensions; unused trailing
/// components of a Vec3 are zero.
inline constexpr int kMaxDim = 3;
using Vec3 = std::array<double, kMaxDim>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorKind {
  InvalidArgument,
  UnknownName,
  Arity,
  Dimension,
  Underresolved,
  WindowInadequate,
  Monotonicity,
  Singular,
  Unbounded,
  Divergent,
  Quadrature,
  DomainLeak,
  Hypothesis,
  Parse,
  Validation,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::UnknownName: return "unknown_name";
    case ErrorKind::Arity: return "arity";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Underresolved: return "underresolved";
    case ErrorKind::WindowInadequate: return "window_inadequate";
    case ErrorKind::Monotonicity: return "monotonicity";
    case ErrorKind::Singular: return "singular";
    case ErrorKind::Unbounded: return "unbounded";
    case ErrorKind::Divergent: return "divergent";
    case ErrorKind::Quadrature: return "quadrature";
    case ErrorKind::DomainLeak: return "domain_leak";
    case ErrorKind::Hypothesis: return "hypothesis";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
  }
  return "unknown";
}

/// Every failure in the library is reported through this type. `value`
/// carries the quantitative part of the diagnosis (violated margin, offending
/// mass fraction, observed increment) when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, double value = 0.0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        value_(value) {}

  ErrorKind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }

 private:
  ErrorKind kind_;
  double value_;
};

inline double norm(const Vec3& v, int dim) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) s += v[j] * v[j];
  return std::sqrt(s);
}

inline double dot(const Vec3& a, const Vec3& b, int dim) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) s += a[j] * b[j];
  return s;
}

inline Vec3 scaled(const Vec3& v, double s) { return {v[0] * s, v[1] * s, v[2] * s}; }

/// Japanese bracket <r> = (1 + r^2)^{1/2}.
inline double bracket(double r) { return std::sqrt(1.0 + r * r); }

/// Raised-cosine step: 0 for u <= 0, 1 for u >= 1.
inline double raised_cosine(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return 0.5 * (1.0 - std::cos(kPi * u));
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace dispersmooth

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "dispersmooth/engine.hpp"
#include "dispersmooth/norms.hpp"

namespace dispersmooth {

/// Two smoothing problems (f, sigma) and (g, tau) compared on the support of
/// chi. Axis mode uses d f / d xi_axis; radial mode uses the radial profiles
/// f'(rho), g'(rho) with sigma, tau evaluated at rho e_1.
struct ComparisonCase {
  enum class Mode { Axis, Radial };
  Mode mode = Mode::Axis;
  int dim = 1;
  SymbolSpec f;
  Smoother sigma;
  SymbolSpec g;
  Smoother tau;
  Cutoff chi = Cutoff::all();
  int axis = 0;
  Vec3 point{0.0, 0.0, 0.0};  // radial mode: x at which norms are compared

  static ComparisonCase radial(SymbolSpec f, Smoother sigma, SymbolSpec g, Smoother tau,
                               Cutoff chi = Cutoff::all()) {
    ComparisonCase c;
    c.mode = Mode::Radial;
    c.dim = f.dim;
    c.f = std::move(f);
    c.sigma = std::move(sigma);
    c.g = std::move(g);
    c.tau = std::move(tau);
    c.chi = std::move(chi);
    return c;
  }

  static ComparisonCase along_axis(SymbolSpec f, Smoother sigma, SymbolSpec g, Smoother tau, int axis = 0,
                                   Cutoff chi = Cutoff::all()) {
    ComparisonCase c;
    c.mode = Mode::Axis;
    c.dim = f.dim;
    c.f = std::move(f);
    c.sigma = std::move(sigma);
    c.g = std::move(g);
    c.tau = std::move(tau);
    c.chi = std::move(chi);
    c.axis = axis;
    return c;
  }

  ComparisonCase swapped() const {
    ComparisonCase c = *this;
    std::swap(c.f, c.g);
    std::swap(c.sigma, c.tau);
    return c;
  }

  /// |sigma| / |df|^{1/2} and |tau| / |dg|^{1/2} at a frequency (radial: xi[0] = rho).
  std::pair<double, double> sides(const Vec3& xi) const {
    double df = 0.0;
    double dg = 0.0;
    Vec3 at = xi;
    if (mode == Mode::Radial) {
      if (!f.radial_profile || !g.radial_profile)
        throw Error(ErrorKind::InvalidArgument, "radial comparison needs radial profiles");
      df = f.radial_profile->df(xi[0]);
      dg = g.radial_profile->df(xi[0]);
      at = {xi[0], 0.0, 0.0};
    } else {
      df = f.partial(axis, xi);
      dg = g.partial(axis, xi);
    }
    const double lhs = df == 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::abs(sigma(at)) / std::sqrt(std::abs(df));
    const double rhs = dg == 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::abs(tau(at)) / std::sqrt(std::abs(dg));
    return {lhs, rhs};
  }
};

struct ValidationRow {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double a_rhs = 0.0;
  double slack = 0.0;  // A rhs - lhs
};

struct ComparisonCertificate {
  double A = 0.0;
  Vec3 argsup{0.0, 0.0, 0.0};
  bool constant = false;
  double constant_value = 0.0;
  double spread = 0.0;      // (max - min) / max of the ratio over included points
  std::size_t exclusions = 0;
  std::size_t included = 0;
  double A_refined = 0.0;   // same sup on the refined box
  std::vector<ValidationRow> residuals;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["A"] = A;
    j["argsup"] = {argsup[0], argsup[1], argsup[2]};
    j["constant"] = constant;
    j["exclusions"] = exclusions;
    j["A_refined"] = A_refined;
    j["residuals"] = nlohmann::json::array();
    for (const auto& r : residuals)
      j["residuals"].push_back({{"label", r.label}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"slack", r.slack}});
    return j;
  }
};

namespace detail {

struct RatioSweep {
  double max = -1.0;
  double min = std::numeric_limits<double>::infinity();
  std::size_t argmax = 0;
  std::size_t excluded = 0;
  std::size_t included = 0;
};

inline RatioSweep sweep_ratio(const ComparisonCase& c, const FrequencyBox& box, double overflow) {
  const std::size_t total = box.size();
  constexpr std::size_t chunk = 2048;
  const std::size_t nchunks = (total + chunk - 1) / chunk;
  std::vector<RatioSweep> part(nchunks);
  parallel_chunks(total, chunk, [&](std::size_t b, std::size_t e) {
    RatioSweep s;
    for (std::size_t i = b; i < e; ++i) {
      const Vec3 xi = box.node(i);
      const Vec3 at = c.mode == ComparisonCase::Mode::Radial ? Vec3{xi[0], 0.0, 0.0} : xi;
      if (c.chi(at) == 0.0) continue;
      const auto [l, r] = c.sides(xi);
      if (std::isnan(l) || std::isnan(r)) {
        ++s.excluded;
        continue;
      }
      if (l == 0.0 && r == 0.0) {
        ++s.excluded;
        continue;
      }
      const double q = l / r;
      if (!(q <= overflow)) {
        std::string where;
        for (int j = 0; j < box.dim; ++j) where += (j ? "," : "") + std::to_string(xi[j]);
        throw Error(ErrorKind::Unbounded, "comparison ratio unbounded near (" + where + ")", q);
      }
      ++s.included;
      if (q > s.max) {
        s.max = q;
        s.argmax = i;
      }
      s.min = std::min(s.min, q);
    }
    part[b / chunk] = s;
  });
  RatioSweep out;
  for (const auto& s : part) {
    out.excluded += s.excluded;
    out.included += s.included;
    out.min = std::min(out.min, s.min);
    if (s.max > out.max) {
      out.max = s.max;
      out.argmax = s.argmax;
    }
  }
  return out;
}

}  // namespace detail

/// A = sup (|sigma| / |df|^{1/2}) / (|tau| / |dg|^{1/2}) over the grid nodes in
/// supp chi where both derivatives are nonzero. Radial cases take a 1-D box in
/// rho.
inline ComparisonCertificate best_ratio(const ComparisonCase& c, const FrequencyBox& box,
                                        double ratio_tol = 1e-9, double overflow = 1e12) {
  if (c.mode == ComparisonCase::Mode::Axis && box.dim != c.dim)
    throw Error(ErrorKind::Dimension, "frequency box and case dimensions differ");
  const auto s = detail::sweep_ratio(c, box, overflow);
  if (s.included == 0) throw Error(ErrorKind::InvalidArgument, "no admissible grid point in supp chi");
  ComparisonCertificate cert;
  cert.A = s.max;
  cert.argsup = box.node(s.argmax);
  cert.exclusions = s.excluded;
  cert.included = s.included;
  cert.spread = s.max > 0.0 ? (s.max - s.min) / s.max : 0.0;
  cert.constant = cert.spread < ratio_tol;
  cert.constant_value = cert.constant ? s.max : 0.0;
  cert.A_refined = detail::sweep_ratio(c, box.refined(), overflow).max;
  return cert;
}

/// Both sides of the compared estimates for one datum by the frequency route.
inline std::pair<double, double> comparison_sides(const ComparisonCase& c, const FreqData& phi) {
  if (c.mode == ComparisonCase::Mode::Radial) {
    const auto rf = RadialSymbol::of(c.f);
    const auto rg = RadialSymbol::of(c.g);
    return {freq_side_norm_radial(rf, c.sigma, c.chi, phi, c.point),
            freq_side_norm_radial(rg, c.tau, c.chi, phi, c.point)};
  }
  const auto d = phi.with_cutoff(c.chi);
  return {freq_side_norm(c.f, c.sigma, d, c.axis).value, freq_side_norm(c.g, c.tau, d, c.axis).value};
}

/// Checks lhs <= A rhs + num_tol on every datum, and equality to eq_tol when
/// the certificate is constant. Throws Validation on a violation.
inline std::vector<ValidationRow> validate(ComparisonCertificate& cert, const ComparisonCase& c,
                                           const std::vector<FreqData>& data, double num_tol = 1e-9,
                                           double eq_tol = 1e-9) {
  cert.residuals.clear();
  for (const auto& phi : data) {
    const auto [l, r] = comparison_sides(c, phi);
    ValidationRow row;
    row.label = phi.label;
    row.lhs = l;
    row.rhs = r;
    row.a_rhs = cert.A * r;
    row.slack = row.a_rhs - l;
    cert.residuals.push_back(row);
    const double scale = std::max(1.0, std::abs(l));
    if (row.slack < -num_tol * scale)
      throw Error(ErrorKind::Validation, "comparison violated on datum " + phi.label, row.slack);
    if (cert.constant && std::abs(row.slack) > eq_tol * scale)
      throw Error(ErrorKind::Validation, "equality case violated on datum " + phi.label, row.slack);
  }
  return cert.residuals;
}

/// lhs / rhs for bumps of the given widths concentrated at the arg-sup point;
/// these approach A as the width shrinks.
inline std::vector<double> converse_check(const ComparisonCertificate& cert, const ComparisonCase& c,
                                          const std::vector<double>& widths) {
  std::vector<double> out;
  for (double w : widths) {
    FreqData bump;
    if (c.mode == ComparisonCase::Mode::Radial) {
      // Radial shell at rho0 in the case dimension.
      const double rho0 = cert.argsup[0];
      const int n = c.f.dim;
      const double reach = rho0 + 9.0 * w;
      bump = FreqData::from_spectrum(
          n,
          [rho0, w, n](const Vec3& xi) {
            const double d = (norm(xi, n) - rho0) / w;
            return Complex(std::exp(-0.5 * d * d), 0.0);
          },
          {-reach, -reach, -reach}, {reach, reach, reach}, 9.0 / w, "shell");
      for (int j = n; j < kMaxDim; ++j) bump.support_lo[j] = bump.support_hi[j] = 0.0;
    } else {
      const int n = c.dim;
      const Vec3 k = cert.argsup;
      bump = FreqData::from_spectrum(
          n,
          [k, w, n](const Vec3& xi) {
            double q = 0.0;
            for (int j = 0; j < n; ++j) q += (xi[j] - k[j]) * (xi[j] - k[j]);
            return Complex(std::exp(-0.5 * q / (w * w)), 0.0);
          },
          k, k, 9.0 / w, "bump");
      for (int j = 0; j < n; ++j) {
        bump.support_lo[j] = k[j] - 9.0 * w;
        bump.support_hi[j] = k[j] + 9.0 * w;
      }
    }
    const auto [l, r] = comparison_sides(c, bump);
    out.push_back(r > 0.0 ? l / r : std::numeric_limits<double>::infinity());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model equalities between estimates of different orders

struct ModelEqualityRow {
  std::string name;
  double m = 0.0;
  double lhs = 0.0;       // norm for order m
  double rhs = 0.0;       // norm for order l
  double factor = 0.0;    // expected lhs / rhs
  double rel_error = 0.0; // |lhs - factor rhs| / (factor rhs)
  std::string route;
};

/// Smoother |xi_j|^e on one axis.
inline Smoother axis_power(int axis, double e) {
  return Smoother::from([axis, e](const Vec3& xi) {
    const double v = std::abs(xi[axis]);
    if (e == 0.0) return 1.0;
    return v == 0.0 ? (e > 0.0 ? 0.0 : std::numeric_limits<double>::infinity()) : std::pow(v, e);
  });
}

/// Smooth data with spectrum in [lo_edge, inf) on axis 0: a Gaussian bump
/// times a raised-cosine step over [lo_edge, lo_edge + ramp].
inline FreqData half_line_bump(int dim, double center, double width, double lo_edge, double ramp,
                               double spatial_center = 0.0) {
  FreqData d = FreqData::from_spectrum(
      dim,
      [dim, center, width, lo_edge, ramp, spatial_center](const Vec3& xi) {
        const double s = raised_cosine((xi[0] - lo_edge) / ramp);
        if (s == 0.0) return Complex{};
        double q = (xi[0] - center) * (xi[0] - center);
        for (int j = 1; j < dim; ++j) q += (xi[j] - center) * (xi[j] - center);
        return s * std::exp(-0.5 * q / (width * width)) * std::polar(1.0, -xi[0] * spatial_center);
      },
      {lo_edge, 0.0, 0.0}, {center + 8.6 * width, 0.0, 0.0}, std::abs(spatial_center) + 8.6 / width + 4.0 / ramp,
      "half_line_bump");
  for (int j = 1; j < dim; ++j) {
    d.support_lo[j] = center - 8.6 * width;
    d.support_hi[j] = center + 8.6 * width;
  }
  return d;
}

/// Frequency-route check of || |D|^{(m-1)/2} e^{it|D|^m} phi(x) ||_{L^2_t}
/// = sqrt(l/m) || |D|^{(l-1)/2} e^{it|D|^l} phi(x) ||_{L^2_t} on half-line
/// data (n = 1) and of the order-independent 2-D normal form identity.
inline std::vector<ModelEqualityRow> model_equalities(const std::vector<double>& m_list, const FreqData& half_line_1d,
                                                      const FreqData& data_2d, double l = 1.0) {
  std::vector<ModelEqualityRow> rows;
  const auto base1 = catalog("power", {l}, 1);
  const double rhs1 = freq_side_norm(base1, Smoother::power(0.5 * (l - 1.0)), half_line_1d).value;
  for (double m : m_list) {
    ModelEqualityRow r;
    r.name = "order_1d";
    r.m = m;
    r.lhs = freq_side_norm(catalog("power", {m}, 1), Smoother::power(0.5 * (m - 1.0)), half_line_1d).value;
    r.rhs = rhs1;
    r.factor = std::sqrt(l / m);
    r.rel_error = std::abs(r.lhs - r.factor * r.rhs) / (r.factor * r.rhs);
    r.route = "freq_side";
    rows.push_back(r);
  }
  const auto base2 = catalog("nonelliptic_model", {l}, 2);
  const double rhs2 = freq_side_norm(base2, axis_power(1, 0.5 * (l - 1.0)), data_2d, 0).value;
  for (double m : m_list) {
    ModelEqualityRow r;
    r.name = "order_2d";
    r.m = m;
    r.lhs = freq_side_norm(catalog("nonelliptic_model", {m}, 2), axis_power(1, 0.5 * (m - 1.0)), data_2d, 0).value;
    r.rhs = rhs2;
    r.factor = 1.0;
    r.rel_error = std::abs(r.lhs - r.rhs) / r.rhs;
    r.route = "freq_side";
    rows.push_back(r);
  }
  return rows;
}

/// Pointwise form of the weighted radial equality
/// || |x|^{b-1} |D|^b e^{it|D|^2} phi || = sqrt(m/2) || |x|^{b-1} |D|^{m/2+b-1} e^{it|D|^m} phi ||:
/// the radial route gives the identity at every x, hence for every weight in x.
inline std::vector<ModelEqualityRow> weighted_radial_equalities(const std::vector<double>& m_list, double beta,
                                                                const FreqData& radial_data, const Vec3& x) {
  std::vector<ModelEqualityRow> rows;
  const int n = radial_data.dim;
  const double base = freq_side_norm_radial(RadialSymbol::of(catalog("power", {2.0}, n)), Smoother::power(beta),
                                            Cutoff::all(), radial_data, x);
  for (double m : m_list) {
    ModelEqualityRow r;
    r.name = "weighted_radial";
    r.m = m;
    r.lhs = base;
    r.rhs = freq_side_norm_radial(RadialSymbol::of(catalog("power", {m}, n)), Smoother::power(0.5 * m + beta - 1.0),
                                  Cutoff::all(), radial_data, x);
    r.factor = std::sqrt(m / 2.0);
    r.rel_error = std::abs(r.lhs - r.factor * r.rhs) / (r.factor * r.rhs);
    r.route = "freq_side_radial";
    rows.push_back(r);
  }
  return rows;
}

}  // namespace dispersmooth

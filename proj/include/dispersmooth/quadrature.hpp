#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <span>
#include <tuple>
#include <vector>

#include "dispersmooth/types.hpp"

namespace dispersmooth::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta on [-1, 1], built
/// by Golub-Welsch from the monic Jacobi recurrence. Rules are cached.
inline std::shared_ptr<const Rule> gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "gauss_jacobi needs n >= 1");
  if (alpha <= -1.0 || beta <= -1.0)
    throw Error(ErrorKind::InvalidArgument, "gauss_jacobi needs alpha, beta > -1");
  static std::map<std::tuple<int, double, double>, std::shared_ptr<const Rule>> cache;
  static std::mutex mutex;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({n, alpha, beta}); it != cache.end()) return it->second;
  }
  const double ab = alpha + beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    if (k == 0) {
      diag(k) = (beta - alpha) / (ab + 2.0);
    } else {
      diag(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
      if (std::abs(beta - alpha) == 0.0) diag(k) = 0.0;
    }
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    double b2;
    if (k == 1) {
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    sub(k - 1) = std::sqrt(b2);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  auto rule = std::make_shared<Rule>();
  rule->nodes.resize(n);
  rule->weights.resize(n);
  if (n == 1) {
    rule->nodes[0] = diag(0);
    rule->weights[0] = mu0;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    for (int i = 0; i < n; ++i) {
      rule->nodes[i] = solver.eigenvalues()(i);
      const double v0 = solver.eigenvectors()(0, i);
      rule->weights[i] = mu0 * v0 * v0;
    }
  }
  std::lock_guard lock(mutex);
  return cache.emplace(std::tuple{n, alpha, beta}, std::move(rule)).first->second;
}

inline std::shared_ptr<const Rule> gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

/// Generalized Gauss-Laguerre rule for the weight x^alpha e^{-x} on [0, inf).
inline std::shared_ptr<const Rule> gauss_laguerre(int n, double alpha) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "gauss_laguerre needs n >= 1");
  if (alpha <= -1.0) throw Error(ErrorKind::InvalidArgument, "gauss_laguerre needs alpha > -1");
  static std::map<std::pair<int, double>, std::shared_ptr<const Rule>> cache;
  static std::mutex mutex;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({n, alpha}); it != cache.end()) return it->second;
  }
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(k * (k + alpha));
  const double mu0 = std::tgamma(alpha + 1.0);
  auto rule = std::make_shared<Rule>();
  rule->nodes.resize(n);
  rule->weights.resize(n);
  if (n == 1) {
    rule->nodes[0] = diag(0);
    rule->weights[0] = mu0;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    for (int i = 0; i < n; ++i) {
      rule->nodes[i] = solver.eigenvalues()(i);
      const double v0 = solver.eigenvectors()(0, i);
      rule->weights[i] = mu0 * v0 * v0;
    }
  }
  std::lock_guard lock(mutex);
  return cache.emplace(std::pair{n, alpha}, std::move(rule)).first->second;
}

/// Trapezoid rule over uniformly spaced samples.
inline double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

/// Cumulative trapezoid: out[k] = integral over the first k intervals.
inline std::vector<double> cumulative_trapezoid(std::span<const double> f, double h) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t k = 1; k < f.size(); ++k) out[k] = out[k - 1] + 0.5 * h * (f[k - 1] + f[k]);
  return out;
}

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  static constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                   0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * wgk[7];
  double gauss = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += wgk[j] * s;
    if (j % 2 == 1) gauss += wg[j / 2] * s;
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration on a finite interval.
template <class F>
Estimate integrate(F&& f, double a, double b, double abs_tol = 1e-12, double rel_tol = 1e-10,
                   int max_intervals = 2000) {
  if (a == b) return {};
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(f, a, b);
  double total = first.value;
  double err = first.error;
  heap.push(first);
  int count = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_intervals) {
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed the running-update rounding.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {total, err, count};
}

/// Aitken delta-squared limit of a sequence with geometric increments.
/// Falls back to the last term when the increments are not geometric.
inline double aitken(double s0, double s1, double s2) {
  const double d1 = s1 - s0;
  const double d2 = s2 - s1;
  if (d1 == 0.0 || std::abs(d2) <= 1e-15 * std::abs(s2)) return s2;
  const double r = d2 / d1;
  if (!(r > 0.0 && r < 1.0)) return s2;
  return s2 + d2 * r / (1.0 - r);
}

}  // namespace dispersmooth::quad

#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "dispersmooth/types.hpp"

namespace dispersmooth {

/// Tensor grid of frequency nodes over a box, endpoints included. Used for
/// classification sweeps and comparison sups.
struct FrequencyBox {
  int dim = 1;
  Vec3 lo{-1.0, -1.0, -1.0};
  Vec3 hi{1.0, 1.0, 1.0};
  std::array<std::size_t, kMaxDim> count{65, 1, 1};

  static FrequencyBox cube(int dim, double half_width, std::size_t per_axis) {
    FrequencyBox b;
    b.dim = dim;
    for (int j = 0; j < kMaxDim; ++j) {
      b.lo[j] = j < dim ? -half_width : 0.0;
      b.hi[j] = j < dim ? half_width : 0.0;
      b.count[j] = j < dim ? per_axis : 1;
    }
    return b;
  }

  static FrequencyBox interval(double lo, double hi, std::size_t count) {
    FrequencyBox b;
    b.dim = 1;
    b.lo = {lo, 0.0, 0.0};
    b.hi = {hi, 0.0, 0.0};
    b.count = {count, 1, 1};
    return b;
  }

  std::size_t size() const {
    std::size_t s = 1;
    for (int j = 0; j < dim; ++j) s *= count[j];
    return s;
  }

  double spacing(int j) const {
    return count[j] > 1 ? (hi[j] - lo[j]) / static_cast<double>(count[j] - 1) : 0.0;
  }

  /// Node for a linear index (axis 0 slowest).
  Vec3 node(std::size_t index) const {
    Vec3 p{0.0, 0.0, 0.0};
    for (int j = dim - 1; j >= 0; --j) {
      const std::size_t i = index % count[j];
      index /= count[j];
      p[j] = lo[j] + spacing(j) * static_cast<double>(i);
    }
    return p;
  }

  FrequencyBox refined() const {
    FrequencyBox b = *this;
    for (int j = 0; j < dim; ++j) b.count[j] = 2 * count[j] - 1;
    return b;
  }
};

/// Space-time sampling grid. Space is the periodic box prod [-L_j, L_j) with
/// N_j points per axis (optionally shifted by half a cell so x = 0 is never a
/// node); frequencies are the matching lattice k * pi / L_j. Time runs over
/// [t0, t1] with nt nodes, endpoints included.
struct GridSpec {
  int dim = 1;
  Vec3 half_extent{16.0, 16.0, 16.0};
  std::array<std::size_t, kMaxDim> n{256, 1, 1};
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t nt = 2;
  bool half_cell_offset = false;

  static GridSpec make(int dim, double half_extent, std::size_t points, double t0, double t1, std::size_t nt) {
    GridSpec g;
    g.dim = dim;
    for (int j = 0; j < kMaxDim; ++j) {
      g.half_extent[j] = j < dim ? half_extent : 0.0;
      g.n[j] = j < dim ? points : 1;
    }
    g.t0 = t0;
    g.t1 = t1;
    g.nt = nt;
    return g;
  }

  std::size_t points() const {
    std::size_t s = 1;
    for (int j = 0; j < dim; ++j) s *= n[j];
    return s;
  }

  std::vector<int> fft_dims() const {
    std::vector<int> d;
    for (int j = 0; j < dim; ++j) d.push_back(static_cast<int>(n[j]));
    return d;
  }

  double dx(int j) const { return 2.0 * half_extent[j] / static_cast<double>(n[j]); }
  double dxi(int j) const { return kPi / half_extent[j]; }
  double nyquist(int j) const { return kPi * static_cast<double>(n[j]) / (2.0 * half_extent[j]); }
  double cell_volume() const {
    double v = 1.0;
    for (int j = 0; j < dim; ++j) v *= dx(j);
    return v;
  }
  double freq_cell_volume() const {
    double v = 1.0;
    for (int j = 0; j < dim; ++j) v *= dxi(j);
    return v;
  }

  double x(int j, std::size_t i) const {
    const double off = half_cell_offset ? 0.5 : 0.0;
    return -half_extent[j] + (static_cast<double>(i) + off) * dx(j);
  }

  /// Signed lattice index for FFT-ordered position i.
  long freq_index(int j, std::size_t i) const {
    const long nn = static_cast<long>(n[j]);
    const long ii = static_cast<long>(i);
    return ii < nn / 2 ? ii : ii - nn;
  }

  double xi(int j, std::size_t i) const { return static_cast<double>(freq_index(j, i)) * dxi(j); }

  /// Frequency (FFT ordering) or space point for a linear index, axis 0 slowest.
  Vec3 freq_point(std::size_t index) const {
    Vec3 p{0.0, 0.0, 0.0};
    for (int j = dim - 1; j >= 0; --j) {
      p[j] = xi(j, index % n[j]);
      index /= n[j];
    }
    return p;
  }

  Vec3 space_point(std::size_t index) const {
    Vec3 p{0.0, 0.0, 0.0};
    for (int j = dim - 1; j >= 0; --j) {
      p[j] = x(j, index % n[j]);
      index /= n[j];
    }
    return p;
  }

  std::array<std::size_t, kMaxDim> unravel(std::size_t index) const {
    std::array<std::size_t, kMaxDim> idx{0, 0, 0};
    for (int j = dim - 1; j >= 0; --j) {
      idx[j] = index % n[j];
      index /= n[j];
    }
    return idx;
  }

  double dt() const { return nt > 1 ? (t1 - t0) / static_cast<double>(nt - 1) : 0.0; }
  double time(std::size_t k) const { return t0 + dt() * static_cast<double>(k); }

  /// Index of the spatial node closest to coordinate value v along axis j.
  std::size_t nearest_x(int j, double v) const {
    const double off = half_cell_offset ? 0.5 : 0.0;
    long i = std::lround((v + half_extent[j]) / dx(j) - off);
    if (i < 0) i = 0;
    if (i >= static_cast<long>(n[j])) i = static_cast<long>(n[j]) - 1;
    return static_cast<std::size_t>(i);
  }

  std::string id() const {
    std::ostringstream os;
    os << "d" << dim;
    for (int j = 0; j < dim; ++j) os << ":L" << half_extent[j] << "N" << n[j];
    os << ":t[" << t0 << "," << t1 << "]x" << nt;
    if (half_cell_offset) os << ":off";
    return os.str();
  }
};

}  // namespace dispersmooth

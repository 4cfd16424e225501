#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "core/error.hpp"

namespace vpk {

/// Uniform velocity grid on [v_min, v_max] with n_v nodes (spacing dv = range/(n_v-1)).
class VelocityGrid {
public:
  VelocityGrid() = default;
  VelocityGrid(double v_min, double v_max, std::size_t n_v) : v_min_(v_min), v_max_(v_max), n_(n_v) {
    require(v_min < v_max, Err::BadArgument, "velocity grid: v_min must be < v_max");
    require(n_v >= 16, Err::BadArgument, "velocity grid: need at least 16 nodes");
    dv_ = (v_max - v_min) / static_cast<double>(n_v - 1);
  }

  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }
  std::size_t size() const { return n_; }
  double dv() const { return dv_; }
  double node(std::size_t i) const { return v_min_ + dv_ * static_cast<double>(i); }

  std::vector<double> nodes() const {
    std::vector<double> v(n_);
    for (std::size_t i = 0; i < n_; ++i) v[i] = node(i);
    return v;
  }

  bool contains(double v) const { return v >= v_min_ && v <= v_max_; }

  /// Index of the node nearest to v (clamped to the grid).
  std::size_t nearest(double v) const {
    double t = (v - v_min_) / dv_;
    if (t <= 0) return 0;
    auto i = static_cast<std::size_t>(t + 0.5);
    return i >= n_ ? n_ - 1 : i;
  }

  bool operator==(const VelocityGrid& o) const {
    return v_min_ == o.v_min_ && v_max_ == o.v_max_ && n_ == o.n_;
  }

private:
  double v_min_ = -8.0, v_max_ = 8.0;
  std::size_t n_ = 4096;
  double dv_ = 16.0 / 4095.0;
};

/// Trapezoid weight of node i on a uniform grid.
inline double trapz_weight(const VelocityGrid& g, std::size_t i) {
  return (i == 0 || i + 1 == g.size()) ? 0.5 * g.dv() : g.dv();
}

double trapz(const VelocityGrid& g, const std::vector<double>& f);

/// Trapezoid integral of w(v)*f(v) for a callable weight.
template <class W>
double trapz_weighted(const VelocityGrid& g, const std::vector<double>& f, W&& w) {
  double s = 0;
  for (std::size_t i = 0; i < g.size(); ++i) s += trapz_weight(g, i) * w(g.node(i)) * f[i];
  return s;
}

/// Quintic (6-point) Lagrange interpolation of uniform samples; zero outside the grid.
double interp6(const VelocityGrid& g, const std::vector<double>& f, double v);

/// 4th-order centered first derivative of uniform samples (one-sided at the ends).
std::vector<double> derivative4(const VelocityGrid& g, const std::vector<double>& f);

/// 6th-order centered first derivative, used where narrow features matter.
std::vector<double> derivative6(const VelocityGrid& g, const std::vector<double>& f);

/// Tensor field f(x_i, v_j) periodic in x over [0, period); row-major, x index slow.
struct Field2D {
  double period = 2.0 * M_PI;
  std::size_t n_x = 0;
  VelocityGrid v_grid;
  std::vector<double> f; // n_x * n_v

  double& at(std::size_t ix, std::size_t iv) { return f[ix * v_grid.size() + iv]; }
  double at(std::size_t ix, std::size_t iv) const { return f[ix * v_grid.size() + iv]; }
  double dx() const { return period / static_cast<double>(n_x); }
  double x_node(std::size_t ix) const { return dx() * static_cast<double>(ix); }
};

} // namespace vpk

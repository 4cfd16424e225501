#include "core/grid.hpp"

#include <array>

namespace vpk {

double trapz(const VelocityGrid& g, const std::vector<double>& f) {
  require(f.size() == g.size(), Err::GridMismatch, "trapz: sample count mismatch");
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * g.dv();
}

double interp6(const VelocityGrid& g, const std::vector<double>& f, double v) {
  const auto n = static_cast<long>(g.size());
  double t = (v - g.v_min()) / g.dv();
  if (t < 0.0 || t > static_cast<double>(n - 1)) return 0.0;
  long base = static_cast<long>(std::floor(t)) - 2;
  if (base < 0) base = 0;
  if (base > n - 6) base = n - 6;
  double s = 0;
  for (long j = 0; j < 6; ++j) {
    double lj = 1.0;
    for (long m = 0; m < 6; ++m) {
      if (m == j) continue;
      lj *= (t - static_cast<double>(base + m)) / static_cast<double>(j - m);
    }
    s += lj * f[static_cast<std::size_t>(base + j)];
  }
  return s;
}

std::vector<double> derivative4(const VelocityGrid& g, const std::vector<double>& f) {
  const std::size_t n = g.size();
  require(f.size() == n && n >= 6, Err::GridMismatch, "derivative4: bad sample count");
  std::vector<double> d(n);
  const double h = g.dv();
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (-f[i + 2] + 8 * f[i + 1] - 8 * f[i - 1] + f[i - 2]) / (12 * h);
  // 4th-order one-sided stencils at the edges
  static const std::array<double, 5> e0 = {-25, 48, -36, 16, -3};
  static const std::array<double, 5> e1 = {-3, -10, 18, -6, 1};
  auto edge = [&](std::size_t i, const std::array<double, 5>& c, bool flip) {
    double s = 0;
    for (std::size_t j = 0; j < 5; ++j) s += c[j] * (flip ? f[i - j] : f[i + j]);
    return (flip ? -s : s) / (12 * h);
  };
  d[0] = edge(0, e0, false);
  d[1] = edge(1, e1, false);
  d[n - 1] = edge(n - 1, e0, true);
  d[n - 2] = edge(n - 2, e1, true);
  return d;
}

std::vector<double> derivative6(const VelocityGrid& g, const std::vector<double>& f) {
  const std::size_t n = g.size();
  require(f.size() == n && n >= 8, Err::GridMismatch, "derivative6: bad sample count");
  std::vector<double> d = derivative4(g, f); // edges stay 4th order
  const double h = g.dv();
  for (std::size_t i = 3; i + 3 < n; ++i)
    d[i] = (f[i + 3] - 9 * f[i + 2] + 45 * f[i + 1] - 45 * f[i - 1] + 9 * f[i - 2] - f[i - 3]) / (60 * h);
  return d;
}

} // namespace vpk

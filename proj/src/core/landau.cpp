#include "core/landau.hpp"

#include <algorithm>
#include <cmath>

namespace vpk {

ModeInitialData make_mode_data(double k, const VelocityGrid& grid,
                               const std::function<std::complex<double>(double)>& fn) {
  ModeInitialData d;
  d.k = k;
  d.grid = grid;
  d.g.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) d.g[i] = fn(grid.node(i));
  return d;
}

FieldTimeSeries conjugate_mode(const FieldTimeSeries& s) {
  FieldTimeSeries out = s;
  out.k = -s.k;
  for (auto& e : out.e) e = std::conj(e);
  return out;
}

FieldTimeSeries landau_field(const VelocityProfile& profile, const ModeInitialData& data,
                             double t_max, std::size_t n_t, const LandauOptions& opt) {
  const double k = data.k;
  require(k > 0, Err::BadArgument, "landau_field: need k > 0");
  require(data.grid == profile.grid(), Err::GridMismatch, "landau_field: data grid mismatch");
  require(n_t >= 2 && t_max > 0, Err::BadArgument, "landau_field: bad time grid");

  if (opt.check_stability) {
    auto rep = critical_period(profile);
    for (const auto& [lo, hi] : rep.unstable_k)
      require(k <= lo || k >= hi, Err::UnstableMode,
              "landau_field: k sits in an unstable interval; use linearized_evolve");
  }

  const auto& g = profile.grid();
  auto F = hilbert_boundary(g, profile.derivative_values());
  auto G = hilbert_boundary(g, data.g);

  double min_denom = 1e300;
  cvec H(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto denom = k * k - F[i];
    min_denom = std::min(min_denom, std::abs(denom));
    H[i] = G[i] / denom;
  }
  require(min_denom >= opt.denominator_floor * k * k, Err::DenominatorNearZero,
          "landau_field: dispersion denominator nearly vanishes (marginal stability)");

  // H decays only algebraically, so a plain truncation rings like 1/(k t x_max)
  // and buries slow field tails. Subtract the first four orders of the moment
  // expansion H ~ -(1/k^2) [M0/x + M1/x^2 + ...] and restore their transforms
  // in closed form (causal limit at t = 0).
  const double k2 = k * k;
  std::complex<double> M0 = 0, M1 = 0, M2 = 0, M3 = 0;
  double vbar = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double w = trapz_weight(g, i), v = g.node(i);
    M0 += w * data.g[i];
    M1 += w * v * data.g[i];
    M2 += w * v * v * data.g[i];
    M3 += w * v * v * v * data.g[i];
    vbar += w * v * profile.values()[i];
  }
  const std::complex<double> c1 = -M0 / k2;
  const std::complex<double> c2 = -M1 / k2;
  const std::complex<double> c3 = -(M2 + M0 / k2) / k2;
  const std::complex<double> c4 = -(M3 + M1 / k2 + 2.0 * vbar * M0 / k2) / k2;
  const double a = 1.0; // regularization scale of the tail templates
  const std::complex<double> u1 = c1;
  const std::complex<double> u2 = c2;
  const std::complex<double> u3 = c3 + a * a * u1;
  const std::complex<double> u4 = c4 + a * a * u2;

  auto win = taper_window(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.node(i);
    double q = x * x + a * a;
    H[i] -= u1 * (x / q) + u2 * (1.0 / q) + u3 * (x / (q * q)) + u4 * (1.0 / (q * q));
    H[i] *= win[i] * trapz_weight(g, i);
  }

  FieldTimeSeries out;
  out.k = k;
  out.t.resize(n_t);
  out.e.resize(n_t);
  const double dt = t_max / static_cast<double>(n_t - 1);
  const std::complex<double> I(0.0, 1.0);
  for (std::size_t j = 0; j < n_t; ++j) {
    double t = dt * static_cast<double>(j);
    // phase recurrence: accumulate e^{-ik x_i t} by per-node rotation
    std::complex<double> rot = std::exp(std::complex<double>(0.0, -k * g.v_min() * t));
    std::complex<double> step = std::exp(std::complex<double>(0.0, -k * g.dv() * t));
    std::complex<double> acc = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      acc += H[i] * rot;
      rot *= step;
    }
    double tau = k * t;
    double decay = std::exp(-a * tau);
    acc += u1 * (-I * M_PI) * decay;                            // x/(x^2+a^2)
    acc += u2 * (M_PI / a) * decay;                             // 1/(x^2+a^2)
    acc += u3 * (-I * M_PI * tau / (2.0 * a)) * decay;          // x/(x^2+a^2)^2
    acc += u4 * (M_PI / (2.0 * a * a * a)) * (1.0 + a * tau) * decay;
    out.t[j] = t;
    out.e[j] = k / (2.0 * M_PI) * acc;
  }
  return out;
}

FieldTimeSeries linearized_evolve(const VelocityProfile& profile, const ModeInitialData& data,
                                  double dt, std::size_t n_steps, const EvolveOptions& opt) {
  const double k = data.k;
  const auto& g = profile.grid();
  require(k > 0 && dt > 0, Err::BadArgument, "linearized_evolve: need k > 0, dt > 0");
  require(data.grid == g, Err::GridMismatch, "linearized_evolve: data grid mismatch");
  double vmax = std::max(std::fabs(g.v_min()), std::fabs(g.v_max()));
  require(dt * k * vmax <= 0.5, Err::StepTooLarge,
          "linearized_evolve: dt k v_max must stay below 1/2");

  auto fp = profile.derivative_values();
  cvec h = data.g;
  cvec half_phase(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    half_phase[i] = std::exp(std::complex<double>(0.0, -k * g.node(i) * 0.5 * dt));

  auto density = [&]() {
    std::complex<double> s = 0;
    for (std::size_t i = 0; i < g.size(); ++i) s += trapz_weight(g, i) * h[i];
    return s;
  };
  auto field = [&]() { return density() / std::complex<double>(0.0, -k); };

  FieldTimeSeries out;
  out.k = k;
  out.t.push_back(0.0);
  out.e.push_back(field());
  for (std::size_t n = 1; n <= n_steps; ++n) {
    for (std::size_t i = 0; i < g.size(); ++i) h[i] *= half_phase[i];
    if (opt.coupling) {
      auto e_mid = field();
      for (std::size_t i = 0; i < g.size(); ++i) h[i] += dt * e_mid * fp[i];
    }
    for (std::size_t i = 0; i < g.size(); ++i) h[i] *= half_phase[i];
    if (n % opt.stride == 0) {
      out.t.push_back(dt * static_cast<double>(n));
      out.e.push_back(field());
    }
  }
  return out;
}

DecayFit fit_decay(const FieldTimeSeries& series, double t_lo, double t_hi) {
  require(t_lo > 0 && t_hi > t_lo, Err::BadArgument, "fit_decay: bad window");
  require(!series.t.empty() && series.t.back() >= t_hi, Err::BadArgument,
          "fit_decay: window outside the series support");
  const double period = 2.0 * M_PI / std::fabs(series.k);

  // envelope = oscillation peaks (largest sample within half a plasma period
  // on both sides); a monotone envelope has no interior peaks, in which case
  // every sample is already on the envelope
  std::vector<double> lt, le;
  auto push = [&](double t, double a) {
    if (a <= 0) return;
    lt.push_back(std::log(t));
    le.push_back(std::log(a));
  };
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    double t = series.t[i];
    if (t < t_lo || t > t_hi) continue;
    double a = std::abs(series.e[i]);
    bool peak = true;
    for (std::size_t j = 0; j < series.t.size() && peak; ++j)
      if (j != i && std::fabs(series.t[j] - t) <= 0.5 * period) peak = std::abs(series.e[j]) <= a;
    if (peak) push(t, a);
  }
  if (lt.size() < 20) {
    lt.clear();
    le.clear();
    for (std::size_t i = 0; i < series.t.size(); ++i)
      if (series.t[i] >= t_lo && series.t[i] <= t_hi) push(series.t[i], std::abs(series.e[i]));
  }
  require(lt.size() >= 20, Err::InsufficientPoints, "fit_decay: fewer than 20 usable envelope points");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  auto n = static_cast<double>(lt.size());
  for (std::size_t i = 0; i < lt.size(); ++i) {
    sx += lt[i];
    sy += le[i];
    sxx += lt[i] * lt[i];
    sxy += lt[i] * le[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double icept = (sy - slope * sx) / n;
  double ymean = sy / n, ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < lt.size(); ++i) {
    double fit = icept + slope * lt[i];
    ss_res += (le[i] - fit) * (le[i] - fit);
    ss_tot += (le[i] - ymean) * (le[i] - ymean);
  }
  DecayFit out;
  out.exponent = -slope;
  out.prefactor = std::exp(icept);
  out.t_lo = t_lo;
  out.t_hi = t_hi;
  out.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

double fit_exponential_rate(const FieldTimeSeries& series, double t_lo, double t_hi) {
  std::vector<double> ts, ls;
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    double t = series.t[i];
    double a = std::abs(series.e[i]);
    if (t < t_lo || t > t_hi || a <= 0) continue;
    ts.push_back(t);
    ls.push_back(std::log(a));
  }
  require(ts.size() >= 8, Err::InsufficientPoints, "fit_exponential_rate: too few points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  auto n = static_cast<double>(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sx += ts[i];
    sy += ls[i];
    sxx += ts[i] * ts[i];
    sxy += ts[i] * ls[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double integral_decay_norm(const std::vector<FieldTimeSeries>& modes, double s_x, double s_v) {
  require(s_v >= 0, Err::BadArgument, "integral_decay_norm: s_v must be nonnegative");
  double acc = 0;
  for (const auto& m : modes) {
    require(m.t.size() == m.e.size() && m.t.size() >= 2, Err::BadArgument,
            "integral_decay_norm: malformed series");
    double dt = m.t[1] - m.t[0];
    double integral = 0;
    for (std::size_t i = 0; i < m.t.size(); ++i) {
      double w = (i == 0 || i + 1 == m.t.size()) ? 0.5 * dt : dt;
      integral += w * std::pow(m.t[i], 2.0 * s_v) * std::norm(m.e[i]);
    }
    acc += std::pow(std::fabs(m.k), 3.0 + 2.0 * s_v + 2.0 * s_x) * integral;
  }
  return std::sqrt(acc);
}

} // namespace vpk

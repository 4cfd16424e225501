#include "core/bgk.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "core/fft.hpp"

namespace vpk {

namespace {

// Composite Simpson over [0, b] of a callable, n odd.
template <class F>
double simpson0(const F& f, double b, std::size_t n) {
  if (n % 2 == 0) ++n;
  double h = b / static_cast<double>(n - 1);
  double s = f(0.0) + f(b);
  for (std::size_t i = 1; i + 1 < n; ++i) s += f(h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

} // namespace

EnergySplit::EnergySplit(const VelocityProfile& p, double match_w, double w_ext, std::size_t n_w) {
  const auto& g = p.grid();
  const double U = std::min(-g.v_min(), g.v_max());
  require(match_w > 0 && match_w <= U * U / 4.0, Err::BadArgument, "energy split: bad match window");
  require(w_ext > 0, Err::BadArgument, "energy split: bad extension range");

  double peak = 0;
  for (double v : p.values()) peak = std::max(peak, std::fabs(v));
  for (int i = 0; i <= 64; ++i) {
    double u = std::sqrt(match_w) * static_cast<double>(i) / 64.0;
    require(std::fabs(p.value(u) - p.value(-u)) <= 1e-8 * peak, Err::NotSymmetric,
            "energy split: profile is not even about the wave speed; symmetrize first");
  }

  const double w_top = U * U + 0.5;
  n_w = std::max(n_w, static_cast<std::size_t>((w_top + w_ext) / 2e-3));
  wgrid_ = VelocityGrid(-w_ext, w_top, n_w);
  gp_.assign(n_w, 0.0);
  gm_.assign(n_w, 0.0);
  match_w_ = match_w;
  for (std::size_t j = 0; j < n_w; ++j) {
    double w = wgrid_.node(j);
    if (w < 0) continue; // filled by the extension below
    double root = std::sqrt(w);
    if (w >= match_w) {
      gp_[j] = p.value(root);
      gm_[j] = p.value(-root);
    } else {
      gp_[j] = gm_[j] = 0.5 * (p.value(root) + p.value(-root));
    }
  }

  // quartic extension of the common branch below w = 0, interpolated through
  // five spread nodes of the fit window in scaled coordinates
  const double fit_hi = std::min(match_w, 8.0 * w_ext);
  double xs[5], ys[5];
  for (int m = 0; m < 5; ++m) {
    double w = fit_hi * static_cast<double>(m) / 4.0;
    std::size_t j = wgrid_.nearest(w);
    xs[m] = wgrid_.node(j) / fit_hi; // scaled abscissa, conditioning stays O(1)
    ys[m] = gp_[j];
  }
  auto quartic = [&](double w) {
    double t = w / fit_hi, val = 0;
    for (int m = 0; m < 5; ++m) {
      double lm = ys[m];
      for (int r = 0; r < 5; ++r)
        if (r != m) lm *= (t - xs[r]) / (xs[m] - xs[r]);
      val += lm;
    }
    return val;
  };
  for (std::size_t j = 0; j < n_w; ++j) {
    double w = wgrid_.node(j);
    if (w >= 0) continue;
    gp_[j] = gm_[j] = quartic(w);
  }
  for (std::size_t j = 0; j < n_w; ++j)
    require(gp_[j] >= -1e-10 * peak && gm_[j] >= -1e-10 * peak, Err::BadArgument,
            "energy split: negative branch values");
}

double EnergySplit::eval(double w, int sign) const {
  if (w > wgrid_.v_max()) return 0.0;
  require(w >= wgrid_.v_min(), Err::OutOfTabulatedRange,
          "energy split: requested energy below the tabulated range");
  return interp6(wgrid_, sign > 0 ? gp_ : gm_, w);
}

double SteadyFamily::f_value(double w, int sign) const {
  if (rescale_delta != 1.0)
    return split.eval(w / (rescale_delta * rescale_delta), sign) / rescale_delta;
  double base = split.eval(w, sign);
  if (gamma > 0 && bump) {
    double gd = gamma * delta;
    base += (gamma / delta) * bump->energy_value(w / (gd * gd));
    base /= 1.0 + bump->c0() * gamma * gamma;
  }
  return base;
}

double SteadyFamily::density_response(double beta) const {
  require(2.0 * beta <= -split.w_min() * 0.999 || beta <= 0, Err::OutOfTabulatedRange,
          "density_response: beta beyond the tabulated trapped range");
  auto integrand = [&](double u) {
    double w = u * u - 2.0 * beta;
    return f_value(w, +1) + f_value(w, -1);
  };
  return simpson0(integrand, u_max, n_u) - 1.0;
}

double SteadyFamily::h_prime0() const {
  const double e = 1e-5;
  return (density_response(e) - density_response(-e)) / (2.0 * e);
}

double density_response(const EnergySplit& split, const BumpFamily& bump, double gamma, double delta,
                        double beta_value) {
  SteadyFamily fam;
  fam.split = split;
  fam.bump = bump;
  fam.gamma = gamma;
  fam.delta = delta;
  fam.u_max = std::sqrt(split.w_max() - 0.5);
  return fam.density_response(beta_value);
}

Orbit solve_orbit(const std::function<double(double)>& h, double amplitude) {
  require(amplitude > 0, Err::BadArgument, "solve_orbit: amplitude must be positive");
  const double eps = 1e-6 * amplitude;
  double hp0 = (h(eps) - h(-eps)) / (2.0 * eps);
  require(hp0 < 0, Err::NotACenter, "solve_orbit: h'(0) >= 0, the origin is not a center");
  // the force at the release point must pull back toward the center,
  // otherwise the trajectory leaves the well immediately
  require(h(amplitude) < 0, Err::OrbitEscapesWell,
          "solve_orbit: no restoring force at the requested amplitude");

  // potential W(beta) = -int_0^beta h on a growing window until the left
  // turning point W = W(amplitude) is bracketed
  double left = -amplitude;
  for (int attempt = 0;; ++attempt) {
    require(attempt < 6, Err::OrbitEscapesWell, "solve_orbit: no left turning point in the well");
    const std::size_t n = 8193;
    VelocityGrid bg(left, amplitude, n);
    std::vector<double> hv(n), W(n);
    for (std::size_t j = 0; j < n; ++j) hv[j] = h(bg.node(j));
    std::size_t j0 = bg.nearest(0.0);
    double dv = bg.dv();
    W[j0] = -(0.0 - bg.node(j0)) * hv[j0]; // node offset from 0 is below dv/2
    // integrate outward from the center node with local 3-point rules
    for (std::size_t j = j0 + 1; j < n; ++j) {
      double hm = hv[j - 1], hc = hv[j];
      double hp = j + 1 < n ? hv[j + 1] : 2.0 * hc - hm;
      W[j] = W[j - 1] - dv * (5.0 * hm + 8.0 * hc - hp) / 12.0;
    }
    for (std::size_t j = j0; j-- > 0;) {
      double hp = hv[j + 1], hc = hv[j];
      double hm = j > 0 ? hv[j - 1] : 2.0 * hc - hp;
      W[j] = W[j + 1] + dv * (5.0 * hp + 8.0 * hc - hm) / 12.0;
    }
    double e0 = interp6(bg, W, amplitude);

    // walk left from the center until W crosses e0
    double beta_minus = 0;
    bool found = false;
    for (std::size_t j = j0; j-- > 0;) {
      if (W[j] >= e0) {
        // refine by bisection on the interpolated W
        double lo = bg.node(j), hi = bg.node(j + 1);
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (lo + hi);
          (interp6(bg, W, mid) >= e0 ? lo : hi) = mid;
        }
        beta_minus = 0.5 * (lo + hi);
        found = true;
        break;
      }
    }
    if (!found) {
      left *= 2.0;
      continue;
    }

    Orbit orb;
    orb.beta_plus = amplitude;
    orb.beta_minus = beta_minus;
    orb.energy = e0;
    orb.beta_grid = bg;
    orb.w_table = W;

    // the orbit must stay strictly inside the well: no interior barrier
    for (int i = 1; i < 64; ++i) {
      double beta = beta_minus + (amplitude - beta_minus) * static_cast<double>(i) / 64.0;
      require(interp6(bg, W, beta) < e0, Err::OrbitEscapesWell,
              "solve_orbit: potential barrier inside the requested orbit");
    }

    // period by the angle substitution beta = m + r sin(theta); midpoint
    // nodes avoid the turning points, doubling until converged
    const double m = 0.5 * (amplitude + beta_minus), r = 0.5 * (amplitude - beta_minus);
    double prev = 0;
    for (std::size_t N = 512; N <= (1u << 17); N *= 2) {
      double dtheta = M_PI / static_cast<double>(N);
      double acc = 0;
      for (std::size_t i = 0; i < N; ++i) {
        double theta = -0.5 * M_PI + dtheta * (static_cast<double>(i) + 0.5);
        double beta = m + r * std::sin(theta);
        double denom = 2.0 * (e0 - interp6(bg, W, beta));
        acc += r * std::cos(theta) / std::sqrt(std::max(denom, 1e-300));
      }
      acc *= dtheta * 2.0; // both halves of the closed orbit
      if (N > 512 && std::fabs(acc - prev) <= 1e-10 * std::fabs(acc)) {
        orb.period = acc;
        return orb;
      }
      prev = acc;
    }
    orb.period = prev;
    return orb;
  }
}

namespace {

// Density response reduced to two one-variable tables: the base profile enters
// through Psi(b) = int s(q^2-b) dq and the bump through the scale-free
// Phi(b) = int G(q^2-b) dq, so the delta bisection costs interpolation only.
struct FastResponse {
  VelocityGrid psi_grid;
  std::vector<double> psi;
  VelocityGrid phi_grid;
  std::vector<double> phi;
  double gamma = 0, delta = 1, c0 = 0, rescale_delta = 1;
  bool has_bump = false;

  double operator()(double beta) const {
    if (rescale_delta != 1.0) {
      double b = 2.0 * beta / (rescale_delta * rescale_delta);
      require(psi_grid.contains(b), Err::OutOfTabulatedRange, "orbit left the tabulated range");
      return interp6(psi_grid, psi, b) - 1.0;
    }
    double b = 2.0 * beta;
    require(psi_grid.contains(b), Err::OutOfTabulatedRange, "orbit left the tabulated range");
    double val = interp6(psi_grid, psi, b);
    if (has_bump) {
      double gd2 = gamma * delta * gamma * delta;
      double bb = 2.0 * beta / gd2;
      require(phi_grid.contains(bb), Err::OutOfTabulatedRange, "orbit left the bump table");
      val += 2.0 * gamma * gamma * interp6(phi_grid, phi, bb);
      val /= 1.0 + c0 * gamma * gamma;
    }
    return val - 1.0;
  }
};

FastResponse make_fast_response(const EnergySplit& split, const std::optional<BumpFamily>& bump,
                                double gamma, double u_max, double b_bump_cap) {
  FastResponse fr;
  const double b_cap = -split.w_min() * 0.98;
  fr.psi_grid = VelocityGrid(-4.0 * b_cap, b_cap, 2049);
  fr.psi.resize(fr.psi_grid.size());
  for (std::size_t j = 0; j < fr.psi_grid.size(); ++j) {
    double b = fr.psi_grid.node(j);
    fr.psi[j] = simpson0(
        [&](double q) {
          double w = q * q - b;
          return split.eval(w, +1) + split.eval(w, -1);
        },
        u_max, 4097);
  }
  if (bump && gamma > 0) {
    fr.has_bump = true;
    fr.gamma = gamma;
    fr.c0 = bump->c0();
    fr.phi_grid = VelocityGrid(-b_bump_cap, b_bump_cap, 16385);
    fr.phi.resize(fr.phi_grid.size());
    double reach = bump->v0 + 12.0;
    for (std::size_t j = 0; j < fr.phi_grid.size(); ++j) {
      double b = fr.phi_grid.node(j);
      double qmax = std::sqrt(std::max(b, 0.0)) + reach;
      fr.phi[j] = simpson0([&](double q) { return bump->energy_value(q * q - b); }, qmax, 2049);
    }
  }
  return fr;
}

} // namespace

OrbitSpec match_period(const VelocityProfile& profile, const BumpFamily& bump, double T_target,
                       double amplitude, double gamma, double period_rtol) {
  require(T_target > 0, Err::BadArgument, "match_period: need T > 0");
  const double k2 = std::pow(2.0 * M_PI / T_target, 2.0);
  const auto& g = profile.grid();
  double a0 = pv_integral(g, profile.derivative_values(), 0.0);

  OrbitSpec spec;
  spec.r = amplitude;
  spec.gamma = gamma;

  const double half_width = 0.25;
  EnergySplit split(profile, half_width * half_width);
  const double u_max = std::min(-g.v_min(), g.v_max());

  const bool case3 = std::fabs(a0 - k2) < 1e-8;
  double c0g2 = 1.0;
  double dstar;
  if (case3) {
    spec.case_id = 3;
    spec.gamma = 0;
    require(a0 > 0, Err::BracketNotFound, "match_period: rescale branch needs a positive integral");
    dstar = std::sqrt(a0 / k2);
  } else {
    double b = bump.pv_over_v();
    spec.case_id = b > 0 ? 1 : 2;
    require((k2 - a0) * b > 0, Err::BracketNotFound,
            "match_period: bump family moves the integral the wrong way");
    require(gamma > 0, Err::BadArgument, "match_period: cases 1 and 2 need gamma > 0");
    c0g2 = 1.0 + bump.c0() * gamma * gamma;
    double d2 = b / (k2 * c0g2 - a0);
    require(d2 > 0, Err::BracketNotFound, "match_period: no bump scale solves the period equation");
    dstar = std::sqrt(d2);
    require(gamma * dstar / 1.3 >= 2.0 * g.dv(), Err::BracketNotFound,
            "match_period: required bump is unresolvable on this grid");
  }

  // tables once; the bump cap covers the widest bracket we will explore
  double b_bump_cap = case3 ? 1.0 : 1.05 * (-split.w_min()) / std::pow(gamma * dstar / 2.0, 2.0);
  auto fr = make_fast_response(split, case3 ? std::nullopt : std::optional<BumpFamily>(bump), gamma,
                               u_max, b_bump_cap);

  auto period_at = [&](double d) {
    FastResponse f = fr;
    if (case3)
      f.rescale_delta = d;
    else
      f.delta = d;
    return solve_orbit([&f](double beta) { return f(beta); }, amplitude).period;
  };
  // orbits can fail to close at extreme bump scales where the center gets
  // shallow; treat such endpoints as out of bracket and pull them inward
  auto try_period = [&](double d) -> std::optional<double> {
    try {
      return period_at(d);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  auto inward = [&](double d) -> std::pair<double, std::optional<double>> {
    auto p = try_period(d);
    for (int k = 0; !p && k < 8 && std::fabs(d / dstar - 1.0) > 1e-3; ++k) {
      d = std::sqrt(d * dstar);
      p = try_period(d);
    }
    return {d, p};
  };

  double lo = dstar / 1.3, hi = dstar * 1.3;
  if (!case3) lo = std::max(lo, 2.0 * g.dv() / gamma);
  auto [lo2, plo_opt] = inward(lo);
  auto [hi2, phi_opt] = inward(hi);
  lo = lo2;
  hi = hi2;
  require(plo_opt && phi_opt, Err::BracketNotFound,
          "match_period: no closed orbit near the nominal bump scale");
  double plo = *plo_opt - T_target, phi_v = *phi_opt - T_target;
  for (int widen = 0; plo * phi_v > 0 && widen < 6; ++widen) {
    // widen the side whose sign matches, cautiously
    if (std::fabs(plo) < std::fabs(phi_v)) {
      double cand = lo / 1.3;
      if (!case3) cand = std::max(cand, 2.0 * g.dv() / gamma);
      if (auto p = try_period(cand)) {
        lo = cand;
        plo = *p - T_target;
      } else {
        break;
      }
    } else {
      if (auto p = try_period(hi * 1.3)) {
        hi *= 1.3;
        phi_v = *p - T_target;
      } else {
        break;
      }
    }
  }
  require(plo * phi_v <= 0, Err::BracketNotFound, "match_period: could not bracket the target period");

  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    double pm = period_at(mid) - T_target;
    if (std::fabs(pm) <= period_rtol * T_target * 0.5) {
      spec.delta = mid;
      return spec;
    }
    if (pm * plo <= 0) {
      hi = mid;
    } else {
      lo = mid;
      plo = pm;
    }
  }
  double mid = 0.5 * (lo + hi);
  require(std::fabs(period_at(mid) - T_target) <= period_rtol * T_target, Err::NoConvergence,
          "match_period: bisection stalled");
  spec.delta = mid;
  return spec;
}

namespace {

BgkWave assemble(const VelocityProfile& base, const VelocityProfile& original_on_wave_grid,
                 const OrbitSpec& spec, double T, double speed, const BgkOptions& opt) {
  const auto& g = base.grid();
  const double u_max = std::min(-g.v_min(), g.v_max());
  EnergySplit split(base, opt.half_width * opt.half_width);

  SteadyFamily fam;
  fam.split = split;
  fam.u_max = u_max;
  fam.n_u = opt.n_u;
  std::optional<BumpFamily> bump;
  if (spec.case_id == 3) {
    fam.rescale_delta = spec.delta;
  } else {
    bump = BumpFamily{spec.case_id == 1 ? BumpFamily::Sign::positive_nu
                                        : BumpFamily::Sign::negative_nu,
                      3.0};
    fam.bump = bump;
    fam.gamma = spec.gamma;
    fam.delta = spec.delta;
  }

  double b_bump_cap =
      spec.case_id == 3 ? 1.0
                        : 1.05 * (-split.w_min()) / std::pow(spec.gamma * spec.delta / 2.0, 2.0);
  auto fr = make_fast_response(split, bump, spec.gamma, u_max, b_bump_cap);
  if (spec.case_id == 3)
    fr.rescale_delta = spec.delta;
  else
    fr.delta = spec.delta;
  auto h = [&fr](double beta) { return fr(beta); };

  auto orb = solve_orbit(h, spec.r);
  require(std::fabs(orb.period - T) <= 10.0 * opt.period_rtol * T, Err::NoConvergence,
          "assemble: orbit period drifted from the matched target");

  BgkWave wave;
  wave.period = T;
  wave.speed = speed;
  wave.spec = spec;
  wave.amplitude = orb.beta_plus - orb.beta_minus;
  wave.h_prime0 = fam.h_prime0();

  // x(theta) over half a period by cumulative quadrature in the angle
  // variable, then beta on the uniform x grid by monotone inversion
  const std::size_t n_theta = 1 << 14;
  const double m = 0.5 * (orb.beta_plus + orb.beta_minus),
               r = 0.5 * (orb.beta_plus - orb.beta_minus);
  std::vector<double> xs(n_theta + 1, 0.0), betas(n_theta + 1);
  betas[0] = orb.beta_plus;
  double dtheta = M_PI / static_cast<double>(n_theta);
  double acc = 0;
  for (std::size_t i = 0; i < n_theta; ++i) {
    // midpoint of each theta panel, walking down from beta_plus
    double theta = 0.5 * M_PI - dtheta * (static_cast<double>(i) + 0.5);
    double beta = m + r * std::sin(theta);
    double denom = 2.0 * (orb.energy - interp6(orb.beta_grid, orb.w_table, beta));
    acc += dtheta * r * std::cos(theta) / std::sqrt(std::max(denom, 1e-300));
    xs[i + 1] = acc;
    betas[i + 1] = m + r * std::sin(0.5 * M_PI - dtheta * static_cast<double>(i + 1));
  }
  // re-anchor the half period exactly onto T/2
  double scale = (0.5 * T) / xs[n_theta];
  for (auto& x : xs) x *= scale;

  const std::size_t nx = opt.n_x;
  wave.x.resize(nx);
  wave.beta.resize(nx);
  wave.e_field.resize(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    double x = T * static_cast<double>(j) / static_cast<double>(nx);
    wave.x[j] = x;
    double xh = x <= 0.5 * T ? x : T - x; // orbit is symmetric about T/2
    auto it = std::lower_bound(xs.begin(), xs.end(), xh);
    std::size_t i1 = std::min<std::size_t>(std::distance(xs.begin(), it), n_theta);
    std::size_t i0 = i1 > 0 ? i1 - 1 : 0;
    double t = xs[i1] > xs[i0] ? (xh - xs[i0]) / (xs[i1] - xs[i0]) : 0.0;
    double beta = betas[i0] + t * (betas[i1] - betas[i0]);
    wave.beta[j] = beta;
    double denom = 2.0 * (orb.energy - interp6(orb.beta_grid, orb.w_table, beta));
    double e_mag = std::sqrt(std::max(denom, 0.0));
    wave.e_field[j] = x <= 0.5 * T ? e_mag : -e_mag; // E = -beta_x
  }

  // H^2(0,T) norm of beta: orbit-size metadata in the bifurcation parameter
  {
    double l2 = 0, d1 = 0, d2n = 0;
    double dx = T / static_cast<double>(nx);
    for (std::size_t j = 0; j < nx; ++j) {
      std::size_t jp = (j + 1) % nx, jm = (j + nx - 1) % nx;
      double b = wave.beta[j];
      double bp = (wave.beta[jp] - wave.beta[jm]) / (2.0 * dx);
      double bpp = (wave.beta[jp] - 2.0 * b + wave.beta[jm]) / (dx * dx);
      l2 += b * b * dx;
      d1 += bp * bp * dx;
      d2n += bpp * bpp * dx;
    }
    wave.beta_h2 = std::sqrt(l2 + d1 + d2n);
  }

  // phase-space density on the wave-frame grid shifted by the speed
  VelocityGrid vgrid(speed + g.v_min(), speed + g.v_max(), opt.n_v);
  wave.f.period = T;
  wave.f.n_x = nx;
  wave.f.v_grid = vgrid;
  wave.f.f.assign(nx * vgrid.size(), 0.0);
  for (std::size_t j = 0; j < nx; ++j) {
    double two_beta = 2.0 * wave.beta[j];
    for (std::size_t i = 0; i < vgrid.size(); ++i) {
      double u = vgrid.node(i) - speed;
      wave.f.at(j, i) = fam.f_value(u * u - two_beta, u > 0 ? +1 : -1);
    }
  }

  auto [vres, pres] = verify_steady(wave);
  wave.vlasov_residual = vres;
  wave.poisson_residual = pres;

  SobolevSpec dspec{opt.s, 2.0, SobolevSpec::Method::spectral_p2};
  wave.distance = weighted_distance(wave.f, original_on_wave_grid.values(), dspec);
  return wave;
}

} // namespace

BgkWave build_bgk(const VelocityProfile& profile, double T, double speed, const BgkOptions& opt) {
  require(T > 0, Err::BadArgument, "build_bgk: need T > 0");
  const auto& g0 = profile.grid();

  // wave-frame window wide enough that the shifted tails stay under
  // tolerance; odd node count pins a node at u = 0 so the symmetrization
  // center does not snap off the origin
  double half_pre = std::max(-g0.v_min(), g0.v_max()) + std::fabs(speed);
  auto n_half = static_cast<std::size_t>(std::ceil(half_pre / g0.dv()));
  double half = static_cast<double>(n_half) * g0.dv();
  VelocityGrid gw(-half, half, 2 * n_half + 1);
  VelocityProfile base(
      gw, [&profile, speed](double u) { return profile.value(u + speed); },
      [&profile, speed](double u) { return profile.derivative(u + speed); }, profile.options());

  base = symmetrize_near(base, 0.0, opt.half_width);
  base = normalize(base);

  const double k2 = std::pow(2.0 * M_PI / T, 2.0);
  double a0 = pv_integral(gw, base.derivative_values(), 0.0);

  BumpFamily bump{(k2 - a0) > 0 ? BumpFamily::Sign::positive_nu : BumpFamily::Sign::negative_nu, 3.0};
  double gamma = 0;
  if (std::fabs(a0 - k2) >= opt.case3_tol)
    gamma = opt.gamma > 0 ? opt.gamma
                          : std::min(std::sqrt(0.5 * opt.epsilon / bump.c0()), 0.3);

  // cases 1 and 2 bifurcate inside the well carved by the bump, whose depth
  // scales like (gamma delta)^2; clamp the requested amplitude to it
  double amplitude = opt.amplitude;
  if (gamma > 0) {
    double b = bump.pv_over_v();
    double d2 = b / (k2 * (1.0 + bump.c0() * gamma * gamma) - a0);
    require(d2 > 0, Err::BracketNotFound, "build_bgk: no bump scale solves the period equation");
    double gd2 = gamma * gamma * d2;
    amplitude = std::min(amplitude, 0.3 * gd2);
  }

  auto spec = match_period(base, bump, T, amplitude, gamma, opt.period_rtol);

  VelocityProfile original_on_wave_grid(
      gw, [&profile](double v) { return profile.value(v); },
      [&profile](double v) { return profile.derivative(v); }, profile.options());

  BgkOptions opt2 = opt;
  opt2.n_v = gw.size(); // keep the assembled grid aligned with the wave frame
  return assemble(base, original_on_wave_grid, spec, T, speed, opt2);
}

std::pair<double, double> verify_steady(const BgkWave& wave) {
  const auto& f = wave.f;
  const std::size_t nx = f.n_x, nv = f.v_grid.size();
  require(wave.beta.size() == nx && wave.e_field.size() == nx, Err::GridMismatch,
          "verify_steady: inconsistent wave arrays");
  const double dx = f.dx();

  // spectral d/dx on the transposed field
  cvec rows(nv * nx);
  for (std::size_t j = 0; j < nx; ++j)
    for (std::size_t i = 0; i < nv; ++i) rows[i * nx + j] = f.at(j, i);
  fft_forward_rows(rows.data(), nv, nx);
  for (std::size_t i = 0; i < nv; ++i)
    for (std::size_t j = 0; j < nx; ++j) {
      auto sj = static_cast<long>(j);
      double kx = 2.0 * M_PI *
                  static_cast<double>(2 * sj <= static_cast<long>(nx) ? sj
                                                                      : sj - static_cast<long>(nx)) /
                  f.period;
      if (2 * j == nx) kx = 0; // drop the unpaired Nyquist mode of the derivative
      rows[i * nx + j] *= std::complex<double>(0.0, kx);
    }
  fft_inverse_rows(rows.data(), nv, nx);

  double vres2 = 0, pres2 = 0;
  const double dv = f.v_grid.dv();
  for (std::size_t j = 0; j < nx; ++j) {
    for (std::size_t i = 0; i < nv; ++i) {
      double dfdx = rows[i * nx + j].real();
      // 6th order centered d/dv, low-order fallback at the (empty) edges
      double dfdv;
      if (i >= 3 && i + 3 < nv) {
        dfdv = (f.at(j, i + 3) - 9 * f.at(j, i + 2) + 45 * f.at(j, i + 1) - 45 * f.at(j, i - 1) +
                9 * f.at(j, i - 2) - f.at(j, i - 3)) /
               (60.0 * dv);
      } else {
        std::size_t ip = std::min(i + 1, nv - 1), im = i > 0 ? i - 1 : 0;
        dfdv = (f.at(j, ip) - f.at(j, im)) / (static_cast<double>(ip - im) * dv);
      }
      double v = f.v_grid.node(i);
      double resid = (v - wave.speed) * dfdx - wave.e_field[j] * dfdv;
      vres2 += resid * resid * dx * trapz_weight(f.v_grid, i);
    }
  }

  // Poisson residual: E_x + rho - 1
  cvec eh(nx);
  for (std::size_t j = 0; j < nx; ++j) eh[j] = wave.e_field[j];
  fft_forward(eh);
  for (std::size_t j = 0; j < nx; ++j) {
    auto sj = static_cast<long>(j);
    double kx = 2.0 * M_PI *
                static_cast<double>(2 * sj <= static_cast<long>(nx) ? sj
                                                                    : sj - static_cast<long>(nx)) /
                f.period;
    if (2 * j == nx) kx = 0;
    eh[j] *= std::complex<double>(0.0, kx);
  }
  fft_inverse(eh);
  for (std::size_t j = 0; j < nx; ++j) {
    double rho = 0;
    for (std::size_t i = 0; i < nv; ++i) rho += trapz_weight(f.v_grid, i) * f.at(j, i);
    double resid = eh[j].real() + rho - 1.0;
    pres2 += resid * resid * dx;
  }
  return {std::sqrt(vres2), std::sqrt(pres2)};
}

void save_wave(const BgkWave& wave, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  char buf[128];
  {
    std::ofstream out(dir + "/beta.csv");
    require(out.good(), Err::Io, "cannot write " + dir + "/beta.csv");
    out << "x,beta,e\n";
    for (std::size_t j = 0; j < wave.x.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", wave.x[j], wave.beta[j],
                    wave.e_field[j]);
      out << buf;
    }
  }
  {
    std::ofstream out(dir + "/f.csv");
    require(out.good(), Err::Io, "cannot write " + dir + "/f.csv");
    out << "x,v,f\n";
    for (std::size_t j = 0; j < wave.f.n_x; ++j)
      for (std::size_t i = 0; i < wave.f.v_grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", wave.f.x_node(j),
                      wave.f.v_grid.node(i), wave.f.at(j, i));
        out << buf;
      }
  }
  {
    nlohmann::json meta;
    meta["period"] = wave.period;
    meta["speed"] = wave.speed;
    meta["amplitude"] = wave.amplitude;
    meta["gamma"] = wave.spec.gamma;
    meta["delta"] = wave.spec.delta;
    meta["case"] = wave.spec.case_id;
    meta["r"] = wave.spec.r;
    meta["beta_h2"] = wave.beta_h2;
    meta["h_prime0"] = wave.h_prime0;
    meta["vlasov_residual"] = wave.vlasov_residual;
    meta["poisson_residual"] = wave.poisson_residual;
    meta["distance_l1"] = wave.distance.l1;
    meta["distance_energy"] = wave.distance.energy_l1;
    meta["distance_wsp"] = wave.distance.wsp;
    std::ofstream out(dir + "/meta.json");
    require(out.good(), Err::Io, "cannot write " + dir + "/meta.json");
    out << meta.dump(2) << "\n";
  }
}

} // namespace vpk

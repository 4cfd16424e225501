#include "core/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace vpk {

namespace {

double smoothstep5(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double smoothstep5_prime(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }

// C^3 shoulder used for spectral tapers; one degree smoother than the cutoff so
// truncation ringing stays below the algebraic decay tails we measure.
double smoothstep7(double u) {
  return u * u * u * u * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)));
}

void check_finite(const std::vector<double>& samples) {
  for (double x : samples)
    require(std::isfinite(x), Err::NonFiniteSample, "non-finite sample");
}

std::vector<double> harmonic_numbers(std::size_t n) {
  std::vector<double> h(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) h[i] = h[i - 1] + 1.0 / static_cast<double>(i);
  return h;
}

} // namespace

double cutoff(double x) {
  double a = std::fabs(x);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  return 1.0 - smoothstep5(a - 1.0);
}

double cutoff_prime(double x) {
  double a = std::fabs(x);
  if (a <= 1.0 || a >= 2.0) return 0.0;
  double d = -smoothstep5_prime(a - 1.0);
  return x < 0 ? -d : d;
}

std::vector<double> taper_window(std::size_t n, double frac) {
  std::vector<double> w(n, 1.0);
  auto m = static_cast<std::size_t>(frac * static_cast<double>(n));
  if (m < 2) return w;
  for (std::size_t i = 0; i < m; ++i) {
    double u = static_cast<double>(i) / static_cast<double>(m);
    double s = smoothstep7(u);
    w[i] = s;
    w[n - 1 - i] = s;
  }
  return w;
}

double pv_integral(const VelocityGrid& g, const std::vector<double>& samples, double c) {
  require(samples.size() == g.size(), Err::GridMismatch, "pv_integral: sample count mismatch");
  check_finite(samples);
  require(c > g.v_min() && c < g.v_max(), Err::PoleOutsideDomain, "pv_integral: pole outside (v_min, v_max)");

  const std::size_t n = g.size();
  const double dv = g.dv();
  const std::size_t ic = g.nearest(c);

  // value and slope at the pole from the quartic through the 5 nearest nodes
  double gc = 0, dgc = 0;
  {
    std::size_t i0 = std::min(std::max<std::size_t>(ic, 2), n - 3) - 2;
    double x[5], y[5];
    for (int j = 0; j < 5; ++j) {
      x[j] = g.node(i0 + static_cast<std::size_t>(j));
      y[j] = samples[i0 + static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < 5; ++j) {
      double lj = 1.0, denom = 1.0, dlj = 0.0;
      for (int m = 0; m < 5; ++m) {
        if (m == j) continue;
        lj *= c - x[m];
        denom *= x[j] - x[m];
      }
      for (int k = 0; k < 5; ++k) {
        if (k == j) continue;
        double prod = 1.0;
        for (int m = 0; m < 5; ++m) {
          if (m == j || m == k) continue;
          prod *= c - x[m];
        }
        dlj += prod;
      }
      gc += y[j] * lj / denom;
      dgc += y[j] * dlj / denom;
    }
  }

  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = g.node(i) - c;
    double integrand = std::fabs(d) < 1e-9 * dv ? dgc : (samples[i] - gc) / d;
    s += trapz_weight(g, i) * integrand;
  }
  return s + gc * std::log((g.v_max() - c) / (c - g.v_min()));
}

namespace {

// Real part of the boundary values at every node: the same singularity
// subtraction as pv_integral, with the g_j/(v_j - x_i) sums batched into one
// FFT convolution and the 1/(v_j - x_i) sums reduced to harmonic numbers.
std::vector<double> pv_all_nodes(const VelocityGrid& g, const std::vector<double>& samples) {
  const std::size_t n = g.size();
  const double dv = g.dv();

  auto win = taper_window(n);
  std::vector<double> gw(n);
  for (std::size_t i = 0; i < n; ++i) gw[i] = samples[i] * win[i];
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = trapz_weight(g, i) * gw[i];

  const std::size_t npad = next_fast_size(2 * n);
  cvec fa(npad), fk(npad);
  for (std::size_t i = 0; i < n; ++i) fa[i] = a[i];
  for (std::size_t m = 1; m < n; ++m) {
    double k = -1.0 / (static_cast<double>(m) * dv); // kernel K(-m), odd
    fk[m] = k;
    fk[npad - m] = -k;
  }
  fft_forward(fa);
  fft_forward(fk);
  for (std::size_t i = 0; i < npad; ++i) fa[i] *= fk[i];
  fft_inverse(fa);

  auto hn = harmonic_numbers(n);
  auto dg = derivative4(g, gw);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double gi = gw[i];
    double conv = fa[i].real();
    if (i == 0 || i + 1 == n) {
      out[i] = conv; // tapered to zero at the ends; log term dropped there
      continue;
    }
    double s_exact = hn[n - 1 - i] - hn[i];
    s_exact -= 0.5 * (-1.0 / static_cast<double>(i) + 1.0 / static_cast<double>(n - 1 - i));
    double logterm = std::log((g.v_max() - g.node(i)) / (g.node(i) - g.v_min()));
    out[i] = conv - gi * s_exact + dv * dg[i] + gi * logterm;
  }
  return out;
}

} // namespace

cvec hilbert_boundary(const VelocityGrid& g, const std::vector<double>& samples) {
  require(samples.size() == g.size(), Err::GridMismatch, "hilbert_boundary: sample count mismatch");
  check_finite(samples);
  auto re = pv_all_nodes(g, samples);
  cvec z(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) z[i] = {re[i], M_PI * samples[i]};
  return z;
}

cvec hilbert_boundary(const VelocityGrid& g, const cvec& samples) {
  std::vector<double> re(samples.size()), im(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    re[i] = samples[i].real();
    im[i] = samples[i].imag();
  }
  auto zr = hilbert_boundary(g, re);
  auto zi = hilbert_boundary(g, im);
  cvec z(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) z[i] = zr[i] + std::complex<double>(0, 1) * zi[i];
  return z;
}

namespace {

// Padded, tapered spectrum of the samples; xi(m) is the angular frequency of
// bin m. Returns the pad size actually used.
std::size_t padded_spectrum(const VelocityGrid& g, const std::vector<double>& samples, cvec& spec,
                            std::size_t pad_factor = 4) {
  const std::size_t n = g.size();
  const std::size_t npad = next_fast_size(pad_factor * n);
  auto win = taper_window(n, 0.02); // inputs decay; only pin the outermost cells
  spec.assign(npad, 0.0);
  for (std::size_t i = 0; i < n; ++i) spec[i] = samples[i] * win[i];
  fft_forward(spec);
  return npad;
}

double xi_of_bin(std::size_t m, std::size_t npad, double dv) {
  auto sm = static_cast<long>(m);
  auto sn = static_cast<long>(npad);
  double ms = static_cast<double>(2 * sm <= sn ? sm : sm - sn);
  return 2.0 * M_PI * ms / (static_cast<double>(npad) * dv);
}

} // namespace

std::vector<double> fractional_derivative_p2(const VelocityGrid& g, const std::vector<double>& samples,
                                             double order, std::size_t pad_factor) {
  require(samples.size() == g.size(), Err::GridMismatch, "fractional_derivative: sample count mismatch");
  require(order >= 0.0 && order <= 4.0, Err::BadArgument, "fractional_derivative: order must be in [0,4]");
  cvec spec;
  std::size_t npad = padded_spectrum(g, samples, spec, pad_factor);
  for (std::size_t m = 0; m < npad; ++m) spec[m] *= std::pow(std::fabs(xi_of_bin(m, npad, g.dv())), order);
  fft_inverse(spec);
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = spec[i].real();
  return out;
}

double lp_norm(const VelocityGrid& g, const std::vector<double>& samples, double p) {
  double s = 0;
  for (std::size_t i = 0; i < g.size(); ++i) s += trapz_weight(g, i) * std::pow(std::fabs(samples[i]), p);
  return std::pow(s, 1.0 / p);
}

namespace {

double abspow(double x, double p) {
  double a = std::fabs(x);
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  return std::pow(a, p);
}

// Gagliardo double integral at fractional order sigma in (0,1). Diagonal cells
// |x-y| < dv/2 are excluded and reinstated through the local Lipschitz bound.
double gagliardo_fractional(const VelocityGrid& g, const std::vector<double>& samples, double sigma,
                            double p) {
  const std::size_t n = g.size();
  const double dv = g.dv();
  std::vector<double> kernel(n);
  for (std::size_t d = 1; d < n; ++d)
    kernel[d] = std::pow(static_cast<double>(d) * dv, -(1.0 + sigma * p));
  double acc = 0;
  for (std::size_t d = 1; d < n; ++d) {
    double row = 0;
    for (std::size_t i = 0; i + d < n; ++i) row += abspow(samples[i + d] - samples[i], p);
    acc += kernel[d] * row;
  }
  acc *= 2.0 * dv * dv; // both orderings of (x, y)

  auto dg = derivative4(g, samples);
  double lip = 0;
  for (std::size_t i = 0; i < n; ++i) lip += trapz_weight(g, i) * abspow(dg[i], p);
  double q = p - sigma * p; // exponent left on |x-y| near the diagonal
  acc += lip * 2.0 * std::pow(0.5 * dv, q) / q;
  return std::pow(acc, 1.0 / p);
}

} // namespace

double sobolev_seminorm(const VelocityGrid& g, const std::vector<double>& samples, double s, double p,
                        SobolevSpec::Method method) {
  if (method == SobolevSpec::Method::spectral_p2) {
    require(p == 2.0, Err::InvalidSpec, "spectral seminorm requires p=2");
    cvec spec;
    std::size_t npad = padded_spectrum(g, samples, spec);
    double acc = 0;
    for (std::size_t m = 0; m < npad; ++m)
      acc += std::pow(std::fabs(xi_of_bin(m, npad, g.dv())), 2.0 * s) * std::norm(spec[m]);
    return std::sqrt(acc * g.dv() / static_cast<double>(npad));
  }
  double frac = s - std::floor(s);
  require(frac > 0.0 && frac < 1.0, Err::InvalidSpec,
          "gagliardo seminorm needs a fractional part in (0,1); integer orders difference instead");
  auto work = samples;
  for (int k = 0; k < static_cast<int>(std::floor(s)); ++k) work = derivative4(g, work);
  return gagliardo_fractional(g, work, frac, p);
}

double sobolev_norm(const VelocityGrid& g, const std::vector<double>& samples, const SobolevSpec& spec) {
  require(spec.p > 1.0 && spec.s >= 0.0, Err::InvalidSpec, "sobolev_norm: need p>1, s>=0");
  if (spec.method == SobolevSpec::Method::spectral_p2) {
    require(spec.p == 2.0, Err::InvalidSpec, "spectral method requires p=2");
    return hs_norm_v(g, samples, spec.s);
  }
  if (spec.s == 0.0) return lp_norm(g, samples, spec.p);
  return lp_norm(g, samples, spec.p) + sobolev_seminorm(g, samples, spec.s, spec.p, spec.method);
}

double hs_norm_v(const VelocityGrid& g, const std::vector<double>& samples, double s,
                 std::size_t pad_factor) {
  cvec spec;
  std::size_t npad = padded_spectrum(g, samples, spec, pad_factor);
  double acc = 0;
  for (std::size_t m = 0; m < npad; ++m) {
    double xi = xi_of_bin(m, npad, g.dv());
    acc += std::pow(1.0 + xi * xi, s) * std::norm(spec[m]);
  }
  return std::sqrt(acc * g.dv() / static_cast<double>(npad));
}

WeightedDistance weighted_distance(const Field2D& f, const std::vector<double>& g_on_vgrid,
                                   const SobolevSpec& spec) {
  const std::size_t nx = f.n_x, nv = f.v_grid.size();
  require(g_on_vgrid.size() == nv, Err::GridMismatch, "weighted_distance: reference grid mismatch");
  require(spec.method == SobolevSpec::Method::spectral_p2 && spec.p == 2.0, Err::InvalidSpec,
          "weighted_distance: only the spectral p=2 norm is supported on 2D fields");

  WeightedDistance out;
  const double dx = f.dx();
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t iv = 0; iv < nv; ++iv) {
      double d = f.at(ix, iv) - g_on_vgrid[iv];
      double w = dx * trapz_weight(f.v_grid, iv);
      double v = f.v_grid.node(iv);
      out.l1 += w * std::fabs(d);
      out.energy_l1 += w * v * v * std::fabs(d);
    }

  // W^{s,2} norm over (x, v): Fourier series in x, padded transform in v.
  const std::size_t npad = next_fast_size(4 * nv);
  auto win = taper_window(nv);
  cvec rows(nx * npad, 0.0);
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t iv = 0; iv < nv; ++iv)
      rows[ix * npad + iv] = (f.at(ix, iv) - g_on_vgrid[iv]) * win[iv];
  fft_forward_rows(rows.data(), nx, npad);

  // transpose so each v-frequency column becomes a contiguous x row
  cvec cols(npad * nx);
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t m = 0; m < npad; ++m) cols[m * nx + ix] = rows[ix * npad + m];
  fft_forward_rows(cols.data(), npad, nx);

  const double dxi = 2.0 * M_PI / (static_cast<double>(npad) * f.v_grid.dv());
  double acc = 0;
  for (std::size_t m = 0; m < npad; ++m) {
    double xi = xi_of_bin(m, npad, f.v_grid.dv());
    for (std::size_t j = 0; j < nx; ++j) {
      auto sj = static_cast<long>(j);
      double js = static_cast<double>(2 * sj <= static_cast<long>(nx) ? sj : sj - static_cast<long>(nx));
      double kx = 2.0 * M_PI * js / f.period;
      // x-DFT gives n_x * (series coefficient); v-DFT gives ghat/dv
      double coef = std::norm(cols[m * nx + j]) * f.v_grid.dv() * f.v_grid.dv() /
                    (static_cast<double>(nx) * static_cast<double>(nx));
      acc += std::pow(1.0 + kx * kx + xi * xi, spec.s) * coef;
    }
  }
  out.wsp = std::sqrt(f.period * acc * dxi / (2.0 * M_PI));
  return out;
}

} // namespace vpk

#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "core/penrose.hpp"
#include "core/profiles.hpp"

namespace vpk {

/// Single-k initial perturbation data: the k-th Fourier coefficient of
/// f(x,v,0) - f0(v), sampled on (a copy of) the profile grid.
struct ModeInitialData {
  double k = 1.0;
  VelocityGrid grid;
  cvec g;
};

ModeInitialData make_mode_data(double k, const VelocityGrid& grid,
                               const std::function<std::complex<double>(double)>& fn);

struct FieldTimeSeries {
  double k = 1.0;
  std::vector<double> t; // uniform, starting at 0
  cvec e;                // E_k(t)
};

/// The mode with wave number -k for a real perturbation: conjugate field.
FieldTimeSeries conjugate_mode(const FieldTimeSeries& s);

struct LandauOptions {
  double denominator_floor = 1e-3; // relative to k^2
  bool check_stability = true;     // reject k inside an unstable interval
};

/// Electric field of the linearized equation via the boundary-value formula:
/// H(x) = G(x+i0) / (k^2 - F(x+i0)), E_k(t) = (k/2pi) integral H e^{-ikxt} dx,
/// evaluated by oscillatory trapezoid on the tapered grid.
FieldTimeSeries landau_field(const VelocityProfile& profile, const ModeInitialData& data,
                             double t_max, std::size_t n_t, const LandauOptions& opt = {});

struct EvolveOptions {
  bool coupling = true;   // false: pure free streaming (phase mixing)
  std::size_t stride = 1; // record every stride-th step
};

/// Time-domain oracle: integrating-factor step for free streaming, midpoint
/// field kick. Exact phase mixing when the coupling is off.
FieldTimeSeries linearized_evolve(const VelocityProfile& profile, const ModeInitialData& data,
                                  double dt, std::size_t n_steps, const EvolveOptions& opt = {});

struct DecayFit {
  double exponent = 0; // |E| ~ prefactor * t^{-exponent}
  double prefactor = 0;
  double t_lo = 0, t_hi = 0;
  double r_squared = 0;
};

/// Algebraic decay fit of the field envelope on [t_lo, t_hi]; the envelope is
/// a running maximum over one plasma period so oscillation nulls do not bias
/// the log fit.
DecayFit fit_decay(const FieldTimeSeries& series, double t_lo, double t_hi);

/// Least squares growth/damping rate of log |E| on [t_lo, t_hi].
double fit_exponential_rate(const FieldTimeSeries& series, double t_lo, double t_hi);

/// Truncated weighted norm (sum_k |k|^{3+2s_v+2s_x} int t^{2s_v} |E_k|^2 dt)^{1/2}.
double integral_decay_norm(const std::vector<FieldTimeSeries>& modes, double s_x, double s_v);

} // namespace vpk

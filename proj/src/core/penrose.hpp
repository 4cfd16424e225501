#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "core/profiles.hpp"

namespace vpk {

struct NyquistCurve {
  VelocityGrid grid; // xi nodes
  cvec z;            // Z(xi + i0)
  struct Crossing {
    double xi = 0;
    double z_real = 0;
    bool is_max = false; // kind of the underlying extremum of f0
  };
  std::vector<Crossing> crossings;
};

/// Boundary values Z(xi+i0) of the dispersion integrand over the profile grid,
/// with the real-axis crossings (zeros of f0') located and evaluated.
NyquistCurve nyquist(const VelocityProfile& profile);

struct ExtremumIntegral {
  double v = 0;
  double integral = 0; // P.V. integral f0'/(v - v_i)
  bool is_max = false;
  bool degenerate = false;
};

struct StabilityReport {
  double t0 = 0; // critical period; +inf when no positive crossing
  double k_max = 0;
  std::vector<ExtremumIntegral> extrema;
  std::vector<std::pair<double, double>> unstable_k; // (k_lo, k_hi) intervals
  std::vector<std::pair<double, double>> gaps;       // stable intervals below k_max
  bool has_degenerate = false;
  // set when the largest positive crossing is not a minimum of f0; the
  // interval assembly trusts the minimum rule and flags instead of guessing
  bool anomalous_top_crossing = false;

  std::string to_json() const;
};

StabilityReport critical_period(const VelocityProfile& profile);

struct DispersionRoot {
  double k = 0;
  std::complex<double> c{0, 0};
  double growth_rate = 0; // k * Im c
  double residual = 0;
  int iterations = 0;
  bool converged = false;
  bool neutral = true; // Im c at or below the neutral threshold
};

struct RootOptions {
  double tol = 1e-10;       // |D(c)| target
  double neutral_im = 1e-6; // below this the mode counts as neutral/stable
  int max_iter = 100;
  double quad_tol = 1e-11;
};

/// D(c) = k^2 - integral f0'(v)/(v-c) dv for Im c > 0, adaptive quadrature
/// with singularity subtraction about Re c.
std::complex<double> dispersion_value(const VelocityProfile& profile, double k, std::complex<double> c,
                                      double quad_tol = 1e-11);

/// Newton iteration on D from the given seed. Throws NoConvergence /
/// RootCollapsedToRealAxis; a converged root with tiny growth comes back
/// flagged neutral rather than as an error.
DispersionRoot dispersion_root(const VelocityProfile& profile, double k, std::complex<double> seed,
                               const RootOptions& opt = {});

/// Tries seeds above every extremum with a positive crossing; deduplicated.
std::vector<DispersionRoot> scan_roots(const VelocityProfile& profile, double k,
                                       const RootOptions& opt = {});

struct NeighborOptions {
  double bump_v0 = 2.0;          // positive-nu family location
  double w_budget = 0.70;        // share of epsilon granted to the W^{s,p} term
  double rescale_budget = 0.20;  // share granted to the rescale deviation
  std::size_t max_nv = 1u << 25; // refinement cap for resolving the bump
  double growth_floor = 1e-11;   // quadrature noise floor for Im c
};

struct UnstableNeighbor {
  VelocityProfile profile;
  double gamma = 0, delta_bump = 0, delta_rescale = 1;
  double dist_l1 = 0, dist_energy = 0, dist_wsp = 0; // 1D triple distance
  double dist_total = 0;
  DispersionRoot root; // at k = 2 pi / T
};

/// Builds a homogeneous state within epsilon of `profile` (1D triple distance
/// at W^{s,2}) that is linearly unstable at x-period T. Fails with
/// TargetNotReachable when no resolvable bump scale meets the budget, which
/// for s > 1.5 is forced by the gamma^{1.5-s} growth of the bump norm.
UnstableNeighbor unstable_neighbor(const VelocityProfile& profile, double T, double s, double epsilon,
                                   const NeighborOptions& opt = {});

} // namespace vpk

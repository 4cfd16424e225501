#pragma once

#include <complex>
#include <vector>

#include "core/fft.hpp"
#include "core/grid.hpp"

namespace vpk {

/// Smooth even cutoff: 1 on |x|<=1, 0 on |x|>=2, quintic smoothstep in between.
double cutoff(double x);
double cutoff_prime(double x);

/// Taper to zero over the outer `frac` of n samples (C^3 smoothstep shoulders).
std::vector<double> taper_window(std::size_t n, double frac = 0.1);

/// Cauchy principal value of integral g(v)/(v-c) dv over the grid, by singularity
/// subtraction with the exact log endpoint term. Second order in dv.
double pv_integral(const VelocityGrid& g, const std::vector<double>& samples, double c);

/// Boundary values G(x+i0) = P.V. integral g(v)/(v-x) dv + i*pi*g(x) at every node,
/// real part via an FFT-accelerated convolution, imaginary part exact.
cvec hilbert_boundary(const VelocityGrid& g, const std::vector<double>& samples);

/// hilbert_boundary applied to complex samples (linearity in g).
cvec hilbert_boundary(const VelocityGrid& g, const cvec& samples);

/// Fourier multiplier |xi|^order on a zero-padded, tapered extension. The
/// kernel of a non-integer order has algebraic tails, so pointwise accuracy
/// far below ~1/pad_length^{1+order} needs a generous pad_factor.
std::vector<double> fractional_derivative_p2(const VelocityGrid& g, const std::vector<double>& samples,
                                             double order, std::size_t pad_factor = 4);

struct SobolevSpec {
  enum class Method { spectral_p2, gagliardo };
  double s = 1.0;
  double p = 2.0;
  Method method = Method::spectral_p2;
};

double lp_norm(const VelocityGrid& g, const std::vector<double>& samples, double p);

/// Homogeneous part only: |D|^s in L^2 (spectral) or the Gagliardo seminorm
/// of the floor(s)-th derivative (general p).
double sobolev_seminorm(const VelocityGrid& g, const std::vector<double>& samples, double s, double p,
                        SobolevSpec::Method method);

/// Full norm. spectral_p2: (integral (1+xi^2)^s |ghat|^2)^(1/2).
/// gagliardo: L^p norm + seminorm.
double sobolev_norm(const VelocityGrid& g, const std::vector<double>& samples, const SobolevSpec& spec);

struct WeightedDistance {
  double l1 = 0;
  double energy_l1 = 0;
  double wsp = 0;
};

/// The three-part distance between a phase-space field and a homogeneous state:
/// L^1, the v^2-weighted L^1, and the W^{s,p} norm of f - g over one period.
WeightedDistance weighted_distance(const Field2D& f, const std::vector<double>& g_on_vgrid,
                                   const SobolevSpec& spec);

/// H^s norm of a single v-slice difference, spectral (p=2). Helper shared with
/// the simulator's distance tracker.
double hs_norm_v(const VelocityGrid& g, const std::vector<double>& samples, double s,
                 std::size_t pad_factor = 4);

} // namespace vpk

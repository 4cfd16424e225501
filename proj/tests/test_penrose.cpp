#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/penrose.hpp"
#include "oracles.hpp"

using namespace vpk;

namespace {
VelocityProfile maxwellian(std::size_t n = 4096) {
  return named_profile("maxwellian", 0.0, VelocityGrid(-8, 8, n));
}
VelocityProfile dgauss(double v0, std::size_t n = 4096) {
  return named_profile("double_gaussian", v0, default_grid("double_gaussian", v0, n));
}
} // namespace

TEST_CASE("nyquist: maxwellian crosses the real axis once, at -1") {
  auto ny = nyquist(maxwellian());
  REQUIRE(ny.crossings.size() == 1);
  CHECK(std::fabs(ny.crossings[0].xi) < 1e-4);
  CHECK(ny.crossings[0].z_real == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(ny.crossings[0].is_max);
}

TEST_CASE("nyquist: imaginary part is pi f0' and double gaussian crossing pattern") {
  auto p = dgauss(3.0);
  auto ny = nyquist(p);
  auto df = p.derivative_values();
  for (std::size_t i = 0; i < ny.z.size(); i += 199) CHECK(ny.z[i].imag() == M_PI * df[i]);

  REQUIRE(ny.crossings.size() == 3);
  CHECK(std::fabs(ny.crossings[0].xi + 3.0) < 1e-3);
  CHECK(std::fabs(ny.crossings[1].xi) < 1e-6);
  CHECK(std::fabs(ny.crossings[2].xi - 3.0) < 1e-3);
  CHECK(ny.crossings[1].z_real > 0.0); // central minimum is destabilizing at v0 = 3
  CHECK(ny.crossings[0].z_real < 0.0);
  CHECK(ny.crossings[2].z_real < 0.0);
}

TEST_CASE("critical_period: maxwellian is stable at every period") {
  auto rep = critical_period(maxwellian());
  CHECK(std::isinf(rep.t0));
  CHECK(rep.unstable_k.empty());
  CHECK(rep.gaps.empty());
  CHECK(!rep.anomalous_top_crossing);
}

TEST_CASE("critical_period: double gaussian has one unstable interval from 0 to k_max") {
  auto p = dgauss(3.0);
  auto rep = critical_period(p);
  REQUIRE(!std::isinf(rep.t0));
  REQUIRE(rep.unstable_k.size() == 1);
  CHECK(rep.unstable_k[0].first == 0.0);
  CHECK(rep.unstable_k[0].second == doctest::Approx(rep.k_max).epsilon(1e-12));
  CHECK(rep.t0 == doctest::Approx(2.0 * M_PI / rep.k_max).epsilon(1e-12));
  // k_max^2 equals the central crossing value
  double central = 0;
  for (const auto& e : rep.extrema)
    if (std::fabs(e.v) < 0.5) central = e.integral;
  CHECK(rep.k_max * rep.k_max == doctest::Approx(central).epsilon(1e-10));
  CHECK(!rep.anomalous_top_crossing); // the maximizer is the central minimum
}

TEST_CASE("critical_period: stable under grid refinement") {
  auto t0_at = [](std::size_t n) { return critical_period(dgauss(3.0, n)).t0; };
  double a = t0_at(4096), b = t0_at(8192);
  CHECK(std::fabs(a - b) / b < 1e-6);
}

TEST_CASE("critical_period: all-negative crossings give an empty unstable set") {
  // wide, gentle double gaussian: still bimodal but with v0 below the
  // destabilization threshold
  auto p = dgauss(1.2);
  auto rep = critical_period(p);
  bool any_positive = false;
  for (const auto& e : rep.extrema) any_positive = any_positive || e.integral > 0;
  if (!any_positive) {
    CHECK(std::isinf(rep.t0));
    CHECK(rep.unstable_k.empty());
  }
}

TEST_CASE("report serializes to json with inf encoded as a string") {
  auto rep = critical_period(maxwellian());
  auto j = rep.to_json();
  CHECK(j.find("\"t0\": \"inf\"") != std::string::npos);
  CHECK(j.find("unstable_intervals") != std::string::npos);
}

TEST_CASE("shift covariance: translated profile shifts crossings, keeps T0") {
  auto p = dgauss(2.5);
  auto rep0 = critical_period(p);
  const auto& g = p.grid();
  const std::size_t shift = 128;
  std::vector<double> shifted(g.size(), 0.0);
  for (std::size_t i = shift; i < g.size(); ++i) shifted[i] = p.values()[i - shift];
  ProfileOptions opt;
  opt.tail_tol = 1e-7;
  auto rep1 = critical_period(VelocityProfile(g, shifted, opt));
  REQUIRE(rep0.extrema.size() == rep1.extrema.size());
  for (std::size_t i = 0; i < rep0.extrema.size(); ++i) {
    CHECK(rep1.extrema[i].v ==
          doctest::Approx(rep0.extrema[i].v + static_cast<double>(shift) * g.dv()).epsilon(1e-9));
    CHECK(rep1.extrema[i].integral == doctest::Approx(rep0.extrema[i].integral).epsilon(1e-5));
  }
  CHECK(rep1.t0 == doctest::Approx(rep0.t0).epsilon(1e-5));
}

TEST_CASE("rescale law: critical wave number scales by 1/delta") {
  VelocityGrid g(-24, 24, 8192);
  auto p = named_profile("double_gaussian", 3.0, g);
  auto rep0 = critical_period(p);
  const double delta = 1.25;
  auto rep1 = critical_period(rescale_profile(p, 0.0, delta));
  CHECK(rep1.k_max == doctest::Approx(rep0.k_max / delta).epsilon(1e-6));
}

TEST_CASE("dispersion_root: unstable mode inside the interval, none above k_max") {
  auto p = dgauss(3.0);
  auto rep = critical_period(p);
  double k_in = 0.7 * rep.k_max;

  auto roots = scan_roots(p, k_in);
  REQUIRE(!roots.empty());
  const auto& r = roots.front();
  CHECK(r.converged);
  CHECK(r.c.imag() > 1e-6);
  CHECK(r.residual <= 1e-8);
  CHECK(r.growth_rate == doctest::Approx(k_in * r.c.imag()).epsilon(1e-14));
  // residual really is |k^2 - integral|
  auto D = dispersion_value(p, k_in, r.c);
  CHECK(std::abs(D) <= 1e-8);

  auto stable = scan_roots(p, 1.3 * rep.k_max);
  for (const auto& q : stable) CHECK(q.c.imag() <= 1e-6);
}

TEST_CASE("dispersion_root: growth vanishes toward the interval edge") {
  auto p = dgauss(3.0);
  auto rep = critical_period(p);
  double g_half = scan_roots(p, 0.5 * rep.k_max).front().growth_rate;
  double g_edge = scan_roots(p, 0.97 * rep.k_max).front().growth_rate;
  CHECK(g_edge < g_half);
  CHECK(g_edge > 0.0);
}

TEST_CASE("dispersion_root: growth rates match at plus and minus phase velocity (symmetry)") {
  // even profile: roots come in +/- Re c pairs with equal growth
  auto p = dgauss(2.4);
  auto rep = critical_period(p);
  double k = 0.8 * rep.k_max;
  auto r = scan_roots(p, k).front();
  // mirror seed
  auto rm = dispersion_root(p, k, std::complex<double>(-r.c.real(), r.c.imag()));
  CHECK(rm.growth_rate == doctest::Approx(r.growth_rate).epsilon(1e-6));
}

TEST_CASE("continuity of the growth rate across the unstable interval") {
  auto p = dgauss(3.0);
  auto rep = critical_period(p);
  double prev = -1;
  std::vector<double> rates;
  for (int i = 1; i <= 8; ++i) {
    double k = rep.k_max * (0.2 + 0.6 * i / 9.0);
    rates.push_back(scan_roots(p, k).front().growth_rate);
  }
  for (double r : rates) {
    CHECK(r > 0);
    CHECK(std::isfinite(r));
    (void)prev;
  }
}

TEST_CASE("unstable_neighbor: infinite budget always succeeds") {
  auto p = maxwellian(2048);
  auto nb = unstable_neighbor(p, 2.0 * M_PI, 1.2, std::numeric_limits<double>::infinity());
  CHECK(nb.root.c.imag() > 0);
  CHECK(nb.gamma > 0);
  CHECK(std::fabs(pv_integral(nb.profile.grid(), nb.profile.derivative_values(), 0.0) -
                  1.0 / (nb.delta_rescale * nb.delta_rescale)) < 1e-3);
}

TEST_CASE("unstable_neighbor: crossover blocks s=1.8 at tight epsilon") {
  auto p = maxwellian(2048);
  CHECK_THROWS_AS(unstable_neighbor(p, 2.0 * M_PI, 1.8, 1e-3), Error);
}

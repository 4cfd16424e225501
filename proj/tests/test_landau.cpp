#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "core/landau.hpp"
#include "oracles.hpp"

using namespace vpk;

namespace {
constexpr double kSqrt2Pi = 2.5066282746310005;

VelocityProfile maxwellian(std::size_t n = 4096) {
  return named_profile("maxwellian", 0.0, VelocityGrid(-8, 8, n));
}

ModeInitialData gaussian_data(double k, const VelocityGrid& g) {
  return make_mode_data(k, g, [](double v) { return std::exp(-v * v); });
}
} // namespace

TEST_CASE("landau_field: zero data gives a zero field") {
  auto p = maxwellian(2048);
  auto d = make_mode_data(0.5, p.grid(), [](double) { return 0.0; });
  auto s = landau_field(p, d, 10.0, 64);
  for (auto e : s.e) CHECK(std::abs(e) == 0.0);
}

TEST_CASE("landau_field: initial value satisfies the Poisson relation") {
  auto p = maxwellian();
  const double k = 0.5;
  auto d = gaussian_data(k, p.grid());
  auto s = landau_field(p, d, 5.0, 32);
  std::complex<double> gint = 0;
  for (std::size_t i = 0; i < p.grid().size(); ++i) gint += trapz_weight(p.grid(), i) * d.g[i];
  auto expect = gint / std::complex<double>(0.0, -k); // -(1/ik) integral g
  CHECK(std::abs(s.e[0] - expect) / std::abs(expect) < 1e-6);
}

TEST_CASE("landau_field is linear in the data") {
  auto p = maxwellian(2048);
  const double k = 0.7;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  double a1 = U(rng), b1 = U(rng), a2 = U(rng), b2 = U(rng);
  auto d1 = make_mode_data(k, p.grid(), [&](double v) {
    return std::complex<double>(a1, b1) * std::exp(-0.5 * (v - 0.4) * (v - 0.4));
  });
  auto d2 = make_mode_data(k, p.grid(), [&](double v) {
    return std::complex<double>(a2, b2) * std::exp(-(v + 0.9) * (v + 0.9));
  });
  ModeInitialData sum = d1;
  for (std::size_t i = 0; i < sum.g.size(); ++i) sum.g[i] += d2.g[i];
  auto s1 = landau_field(p, d1, 8.0, 41);
  auto s2 = landau_field(p, d2, 8.0, 41);
  auto s12 = landau_field(p, sum, 8.0, 41);
  double scale = 0;
  for (std::size_t j = 0; j < s12.e.size(); ++j) scale = std::max(scale, std::abs(s12.e[j]));
  for (std::size_t j = 0; j < s12.e.size(); ++j)
    CHECK(std::abs(s12.e[j] - s1.e[j] - s2.e[j]) < 1e-10 * scale);
}

TEST_CASE("conjugate_mode flips k and conjugates the field") {
  FieldTimeSeries s;
  s.k = 0.5;
  s.t = {0.0, 1.0};
  s.e = {{1.0, 2.0}, {-0.5, 0.25}};
  auto c = conjugate_mode(s);
  CHECK(c.k == -0.5);
  CHECK(c.e[0] == std::conj(s.e[0]));
  CHECK(c.e[1] == std::conj(s.e[1]));
}

TEST_CASE("landau_field: unstable wave numbers are rejected") {
  auto g = default_grid("double_gaussian", 3.0, 4096);
  auto p = named_profile("double_gaussian", 3.0, g);
  auto rep = critical_period(p);
  auto d = gaussian_data(0.5 * rep.k_max, g);
  CHECK_THROWS_AS(landau_field(p, d, 10.0, 32), Error);
}

TEST_CASE("landau_field: marginal k trips the denominator floor") {
  // odd node count puts a grid node exactly on the crossing, where the
  // denominator bottoms out at |k^2 - k_max^2|
  auto g = default_grid("double_gaussian", 3.0, 4097);
  auto p = named_profile("double_gaussian", 3.0, g);
  auto rep = critical_period(p);
  auto d = gaussian_data(1.0001 * rep.k_max, g);
  CHECK_THROWS_AS(landau_field(p, d, 10.0, 32), Error);
}

TEST_CASE("linearized_evolve: free streaming reproduces Gaussian phase mixing") {
  auto p = maxwellian();
  const double k = 0.5;
  auto d = make_mode_data(k, p.grid(),
                          [](double v) { return std::exp(-0.5 * v * v) / kSqrt2Pi; });
  EvolveOptions opt;
  opt.coupling = false;
  auto s = linearized_evolve(p, d, 0.1, 240, opt);
  for (std::size_t j = 0; j < s.t.size(); j += 20) {
    double t = s.t[j];
    double expect = std::exp(-0.5 * k * k * t * t); // |integral of h| for the Maxwellian mode
    CHECK(std::fabs(k * std::abs(s.e[j]) - expect) < 1e-8);
  }
}

TEST_CASE("linearized_evolve: zero data stays zero, dt guard works") {
  auto p = maxwellian(1024);
  auto d = make_mode_data(0.5, p.grid(), [](double) { return 0.0; });
  auto s = linearized_evolve(p, d, 0.1, 50);
  for (auto e : s.e) CHECK(std::abs(e) == 0.0);
  CHECK_THROWS_AS(linearized_evolve(p, d, 0.5, 10), Error);
}

TEST_CASE("contour field against the time-domain oracle, stable Maxwellian mode") {
  // the residual tail of H rings like x_max^{-5}/(kt); [-12,12] keeps it well
  // under the comparison tolerance
  auto p = named_profile("maxwellian", 0.0, VelocityGrid(-12, 12, 6145));
  const double k = 0.5, t_max = 40.0;
  auto d = gaussian_data(k, p.grid());
  auto contour = landau_field(p, d, t_max, 401);

  const double dt = 0.0125; // 8 samples of the oracle per contour sample
  EvolveOptions opt;
  opt.stride = 8;
  auto oracle = linearized_evolve(p, d, dt, 3200, opt);
  REQUIRE(oracle.t.size() == contour.t.size());

  double sup_ref = 0, sup_err = 0;
  for (std::size_t j = 0; j < contour.t.size(); ++j) {
    CHECK(std::fabs(oracle.t[j] - contour.t[j]) < 1e-9);
    sup_ref = std::max(sup_ref, std::abs(oracle.e[j]));
    sup_err = std::max(sup_err, std::abs(oracle.e[j] - contour.e[j]));
  }
  CHECK(sup_err / sup_ref <= 1e-3);
}

TEST_CASE("fit_decay: exact power law is recovered") {
  FieldTimeSeries s;
  s.k = 1.0;
  for (int i = 0; i <= 4000; ++i) {
    double t = 0.1 * i;
    s.t.push_back(t);
    s.e.push_back(t > 0 ? std::pow(t, -3.0) : 0.0);
  }
  auto fit = fit_decay(s, 20.0, 200.0);
  CHECK(std::fabs(fit.exponent - 3.0) < 1e-3);
  CHECK(fit.r_squared > 0.9999);
}

TEST_CASE("fit_decay: insufficient points rejected") {
  FieldTimeSeries s;
  s.k = 1.0;
  for (int i = 0; i <= 30; ++i) {
    s.t.push_back(i);
    s.e.push_back(1.0 / (1.0 + i));
  }
  CHECK_THROWS_AS(fit_decay(s, 25.0, 29.0), Error);
}

TEST_CASE("unstable mode growth matches the dispersion root within 2 percent") {
  auto g = default_grid("double_gaussian", 2.4, 4096);
  auto p = named_profile("double_gaussian", 2.4, g);
  auto rep = critical_period(p);
  REQUIRE(!std::isinf(rep.t0));
  const double k = 0.3;
  REQUIRE(k < rep.k_max);

  auto root = scan_roots(p, k).front();
  REQUIRE(root.c.imag() > 1e-4);

  auto d = gaussian_data(k, g);
  EvolveOptions opt;
  opt.stride = 10;
  auto s = linearized_evolve(p, d, 0.14, 1500, opt);
  double rate = fit_exponential_rate(s, 100.0, 200.0);
  CHECK(std::fabs(rate - root.growth_rate) / root.growth_rate < 0.02);
}

TEST_CASE("integral_decay_norm: single mode collapse and zero field") {
  FieldTimeSeries z;
  z.k = 1.5;
  for (int i = 0; i < 64; ++i) {
    z.t.push_back(0.25 * i);
    z.e.push_back(0.0);
  }
  CHECK(integral_decay_norm({z}, 0.7, 1.0) == 0.0);

  FieldTimeSeries s = z;
  for (int i = 0; i < 64; ++i) s.e[static_cast<std::size_t>(i)] = std::exp(-0.1 * s.t[static_cast<std::size_t>(i)]);
  double l2t = 0;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    double w = (i == 0 || i + 1 == s.t.size()) ? 0.125 : 0.25;
    l2t += w * std::norm(s.e[i]);
  }
  double expect = std::pow(1.5, 1.5) * std::sqrt(l2t);
  CHECK(integral_decay_norm({s}, 0.0, 0.0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(integral_decay_norm({s}, 0.0, -0.5), Error);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "core/sim.hpp"
#include "oracles.hpp"

using namespace vpk;

namespace {
VelocityProfile maxwellian(std::size_t n = 1024) {
  return normalize(named_profile("maxwellian", 0.0, VelocityGrid(-8, 8, n)));
}
} // namespace

TEST_CASE("poisson_solve: homogeneous state carries no field") {
  auto f = perturbed_equilibrium(maxwellian(), 2.0 * M_PI, 32, 0.0);
  for (double e : poisson_solve(f)) CHECK(std::fabs(e) < 1e-13);
}

TEST_CASE("poisson_solve: cosine density gives the closed-form field") {
  const double T = 2.0 * M_PI, eps = 1e-3;
  auto f = perturbed_equilibrium(maxwellian(), T, 64, eps);
  auto e = poisson_solve(f);
  double mean = 0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    double x = f.x_node(j);
    double expect = -eps * (T / (2.0 * M_PI)) * std::sin(2.0 * M_PI * x / T);
    CHECK(std::fabs(e[j] - expect) < 1e-12);
    mean += e[j];
  }
  CHECK(std::fabs(mean / static_cast<double>(e.size())) < 1e-14);
}

TEST_CASE("poisson_solve: broken neutrality is rejected") {
  auto f = perturbed_equilibrium(maxwellian(), 2.0 * M_PI, 32, 0.0);
  for (auto& x : f.f) x *= 1.01;
  CHECK_THROWS_AS(poisson_solve(f), Error);
}

TEST_CASE("step: dt = 0 is the identity, free streaming shifts the mode phase") {
  const double T = 2.0 * M_PI, eps = 1e-4, k = 1.0;
  auto p = maxwellian(512);
  auto f0 = perturbed_equilibrium(p, T, 64, eps);

  SimOptions opt;
  opt.dt = 0.1;
  opt.coupling = false;
  opt.accuracy_bound = 10.0; // the spectral x shift is exact at any dt
  Simulator sim(f0, opt);
  sim.step_signed(0.0);
  for (std::size_t m = 0; m < f0.f.size(); m += 97) CHECK(sim.state().f[m] == f0.f[m]);

  sim.step();
  // exact single-mode answer: f0(v) (1 + eps cos(k (x - v dt)))
  double worst = 0;
  for (std::size_t j = 0; j < f0.n_x; j += 5)
    for (std::size_t i = 0; i < f0.v_grid.size(); i += 7) {
      double x = f0.x_node(j), v = f0.v_grid.node(i);
      double expect = p.values()[i] * (1.0 + eps * std::cos(k * (x - v * opt.dt)));
      worst = std::max(worst, std::fabs(sim.state().at(j, i) - expect));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("step: free-streaming phase mixing of the density mode") {
  const double T = 4.0 * M_PI, eps = 1e-4, k = 0.5;
  auto p = maxwellian(2048);
  auto f0 = perturbed_equilibrium(p, T, 64, eps);
  SimOptions opt;
  opt.dt = 0.04;
  opt.coupling = false;
  Simulator sim(f0, opt);
  for (int n = 1; n <= 250; ++n) {
    sim.step();
    if (n % 50) continue;
    double t = opt.dt * n;
    // mode-1 density amplitude
    std::complex<double> rho1 = 0;
    for (std::size_t j = 0; j < f0.n_x; ++j) {
      double r = 0;
      for (std::size_t i = 0; i < f0.v_grid.size(); ++i)
        r += trapz_weight(f0.v_grid, i) * sim.state().at(j, i);
      rho1 += r * std::exp(std::complex<double>(0, -k * sim.state().x_node(j)));
    }
    rho1 /= static_cast<double>(f0.n_x);
    double expect = 0.5 * eps * std::exp(-0.5 * k * k * t * t);
    CHECK(std::fabs(std::abs(rho1) - expect) < 1e-6);
  }
}

TEST_CASE("evolve: equilibrium stays quiet, invariants hold") {
  auto p = maxwellian(1024);
  auto f0 = perturbed_equilibrium(p, 2.0 * M_PI, 32, 0.0);
  SimOptions opt;
  opt.dt = 0.04;
  Simulator sim(f0, opt);
  auto d = sim.evolve(250, 25, p.values(), {1.2});
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    CHECK(d.e_l2[i] <= 1e-12);
    CHECK(std::fabs(d.mass[i] - d.mass[0]) <= 1e-12 * d.mass[0]);
    CHECK(std::fabs(d.energy[i] - d.energy[0]) <= 1e-10 * d.energy[0]);
    CHECK(d.dist[0][i] <= 1e-10);
  }
  CHECK(d.undershoot_events == 0);
}

TEST_CASE("evolve: weak perturbation conserves mass/momentum/energy and the density bound") {
  auto p = maxwellian(1024);
  auto f0 = perturbed_equilibrium(p, 4.0 * M_PI, 64, 1e-3);
  SimOptions opt;
  opt.dt = 0.045;
  Simulator sim(f0, opt);
  auto d = sim.evolve(400, 40, p.values(), {});
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    CHECK(std::fabs(d.mass[i] - d.mass[0]) <= 1e-11 * d.mass[0]);
    CHECK(std::fabs(d.momentum[i] - d.momentum[0]) <= 1e-8);
    CHECK(std::fabs(d.energy[i] - d.energy[0]) <= 1e-6 * d.energy[0]);
  }
  CHECK(density_bound_ratio(sim.state()) <= 1.0);
}

TEST_CASE("step: time reversal returns the state") {
  auto p = maxwellian(1024);
  auto f0 = perturbed_equilibrium(p, 4.0 * M_PI, 48, 1e-2);
  SimOptions opt;
  opt.dt = 0.05;
  Simulator sim(f0, opt);
  for (int n = 0; n < 5; ++n) sim.step();
  for (int n = 0; n < 5; ++n) sim.step_signed(-opt.dt);
  double worst = 0, fmax = 0;
  for (std::size_t m = 0; m < f0.f.size(); ++m) {
    worst = std::max(worst, std::fabs(sim.state().f[m] - f0.f[m]));
    fmax = std::max(fmax, f0.f[m]);
  }
  CHECK(worst <= 1e-9 * fmax);
}

TEST_CASE("step guards: accuracy bounds throw") {
  auto p = maxwellian(512);
  auto f0 = perturbed_equilibrium(p, 2.0 * M_PI, 32, 0.0);
  SimOptions opt;
  opt.dt = 10.0; // dt max|v|/dx far beyond the bound
  CHECK_THROWS_AS(Simulator(f0, opt), Error);
}

TEST_CASE("distance_tracker: zero at the reference, separable perturbations factor") {
  auto p = maxwellian(1024);
  const double T = 2.0 * M_PI;
  auto f = perturbed_equilibrium(p, T, 64, 0.0);
  CHECK(distance_tracker(f, p.values(), 1.2) == 0.0);

  const double eps = 1e-3, s = 1.2;
  std::vector<double> psi(p.grid().size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    double v = p.grid().node(i);
    psi[i] = std::exp(-v * v);
  }
  for (std::size_t j = 0; j < f.n_x; ++j)
    for (std::size_t i = 0; i < psi.size(); ++i)
      f.at(j, i) += eps * std::cos(2.0 * M_PI * f.x_node(j) / T) * psi[i];
  double phi_l2 = 0;
  for (std::size_t j = 0; j < f.n_x; ++j) {
    double c = std::cos(2.0 * M_PI * f.x_node(j) / T);
    phi_l2 += f.dx() * c * c;
  }
  double expect = eps * std::sqrt(phi_l2) * hs_norm_v(p.grid(), psi, s);
  CHECK(distance_tracker(f, p.values(), s) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("checkpoint round trip") {
  auto p = maxwellian(256);
  auto f = perturbed_equilibrium(p, 2.0 * M_PI, 16, 1e-3);
  save_state(f, "state_test_dir");
  auto g = load_state("state_test_dir");
  CHECK(g.period == f.period);
  CHECK(g.n_x == f.n_x);
  REQUIRE(g.f.size() == f.f.size());
  double worst = 0;
  for (std::size_t m = 0; m < f.f.size(); ++m) worst = std::max(worst, std::fabs(g.f[m] - f.f[m]));
  CHECK(worst == 0.0);
  std::filesystem::remove_all("state_test_dir");
}

TEST_CASE("diagnostics csv layout") {
  SimDiagnostics d;
  d.s_indices = {1.2};
  d.t = {0.0, 0.5};
  d.mass = {1.0, 1.0};
  d.momentum = {0.0, 0.0};
  d.energy = {2.0, 2.0};
  d.e_l2 = {0.1, 0.05};
  d.f_l2 = {1.0, 1.0};
  d.dist = {{0.0, 0.01}};
  save_diagnostics_csv(d, "diag_test.csv");
  std::ifstream in("diag_test.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,mass,momentum,energy,e_l2,f_l2,dist_s1.2");
  std::filesystem::remove("diag_test.csv");
}

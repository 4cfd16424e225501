#pragma once

#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/profiles.hpp"

namespace vpk {

/// E(x) with zero mean from the spectral antiderivative of 1 - rho.
/// Throws NeutralityViolated when the mean density is off unity.
std::vector<double> poisson_solve(const Field2D& f, double tol = 1e-8);

struct SimOptions {
  double dt = 0.05;
  double frame_speed = 0;  // advection uses v - frame_speed (co-moving runs)
  bool coupling = true;    // false: pure free streaming
  enum class VInterp { lagrange6, cubic_spline } v_interp = VInterp::lagrange6;
  double accuracy_bound = 2.0; // dt max|v|/dx and dt max|E|/dv must stay below
};

struct SimDiagnostics {
  std::vector<double> s_indices; // Sobolev orders tracked against the reference
  std::vector<double> t, mass, momentum, energy, e_l2, f_l2;
  std::vector<std::vector<double>> dist; // dist[i] tracks s_indices[i]
  std::size_t undershoot_events = 0;     // f < -1e-12 max f after interpolation
};

/// Strang-split semi-Lagrangian stepper: half x-advection (spectral shift),
/// field kick (interpolated v shift), half x-advection. Owns its state.
class Simulator {
public:
  Simulator(Field2D initial, SimOptions opt = {});

  const Field2D& state() const { return state_; }
  const SimOptions& options() const { return opt_; }
  std::vector<double> field() const { return poisson_solve(state_); }

  void step();
  void step_signed(double dt); // time-reversal experiments

  /// Runs n_steps, recording diagnostics every stride steps (and at t = 0).
  SimDiagnostics evolve(std::size_t n_steps, std::size_t stride,
                        const std::vector<double>& reference = {},
                        const std::vector<double>& s_indices = {});

  std::size_t undershoot_events() const { return undershoots_; }

private:
  void advect_x(double dt);
  void kick_v(double dt);

  Field2D state_;
  SimOptions opt_;
  std::size_t undershoots_ = 0;
  cvec phase_;        // cached x-shift phases for dt/2
  double phase_dt_ = 0;
};

/// f0(v) (1 + eps cos(2 pi m x / T)) over one period; profile must be
/// normalized so the state stays neutral.
Field2D perturbed_equilibrium(const VelocityProfile& profile, double T, std::size_t n_x, double eps,
                              int mode = 1);

/// L2_x H^s_v distance of the state to a homogeneous reference profile.
double distance_tracker(const Field2D& f, const std::vector<double>& reference, double s);

/// Pointwise kinetic density bound rho <= 3 ||f||_inf^{2/3} (int v^2 f dv)^{1/3};
/// returns the largest ratio rho / bound over x (<= 1 when the bound holds).
double density_bound_ratio(const Field2D& f);

void save_state(const Field2D& f, const std::string& dir);
Field2D load_state(const std::string& dir);
void save_diagnostics_csv(const SimDiagnostics& d, const std::string& path);

} // namespace vpk

#include "core/sim.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/fft.hpp"
#include "core/quadrature.hpp"

namespace vpk {

namespace {

double kx_mode(std::size_t j, std::size_t nx, double period) {
  auto sj = static_cast<long>(j);
  double m = static_cast<double>(2 * sj <= static_cast<long>(nx) ? sj : sj - static_cast<long>(nx));
  return 2.0 * M_PI * m / period;
}

} // namespace

std::vector<double> poisson_solve(const Field2D& f, double tol) {
  const std::size_t nx = f.n_x, nv = f.v_grid.size();
  require(nx >= 2 && f.f.size() == nx * nv, Err::GridMismatch, "poisson_solve: malformed field");
  cvec rho(nx);
  double mean = 0;
  for (std::size_t j = 0; j < nx; ++j) {
    double r = 0;
    for (std::size_t i = 0; i < nv; ++i) r += trapz_weight(f.v_grid, i) * f.at(j, i);
    rho[j] = r;
    mean += r;
  }
  mean /= static_cast<double>(nx);
  require(std::fabs(mean - 1.0) <= tol, Err::NeutralityViolated,
          "poisson_solve: mean density is off unity");

  // E_x = 1 - rho, zero-mean antiderivative in Fourier space
  fft_forward(rho);
  for (std::size_t j = 0; j < nx; ++j) {
    if (j == 0 || 2 * j == nx) {
      rho[j] = 0;
      continue;
    }
    double kx = kx_mode(j, nx, f.period);
    rho[j] = -rho[j] / std::complex<double>(0.0, kx); // (1 - rho)^ / (ik), 1 only feeds k=0
  }
  fft_inverse(rho);
  std::vector<double> e(nx);
  for (std::size_t j = 0; j < nx; ++j) e[j] = rho[j].real();
  return e;
}

Simulator::Simulator(Field2D initial, SimOptions opt) : state_(std::move(initial)), opt_(opt) {
  require(state_.n_x >= 4 && state_.f.size() == state_.n_x * state_.v_grid.size(), Err::GridMismatch,
          "simulator: malformed initial state");
  double vmax = 0;
  for (double v : {state_.v_grid.v_min(), state_.v_grid.v_max()})
    vmax = std::max(vmax, std::fabs(v - opt_.frame_speed));
  require(opt_.dt * vmax / state_.dx() <= opt_.accuracy_bound, Err::StepTooLarge,
          "simulator: dt max|v|/dx beyond the accuracy bound");
}

void Simulator::advect_x(double dt) {
  const std::size_t nx = state_.n_x, nv = state_.v_grid.size();
  if (phase_.size() != nx * nv || phase_dt_ != dt) {
    phase_.assign(nx * nv, 0.0);
    for (std::size_t i = 0; i < nv; ++i) {
      double v = state_.v_grid.node(i) - opt_.frame_speed;
      for (std::size_t j = 0; j < nx; ++j)
        phase_[i * nx + j] = std::exp(std::complex<double>(0.0, -kx_mode(j, nx, state_.period) * v * dt));
    }
    phase_dt_ = dt;
  }
  cvec tr(nv * nx);
  for (std::size_t j = 0; j < nx; ++j)
    for (std::size_t i = 0; i < nv; ++i) tr[i * nx + j] = state_.at(j, i);
  fft_forward_rows(tr.data(), nv, nx);
  for (std::size_t m = 0; m < nv * nx; ++m) tr[m] *= phase_[m];
  fft_inverse_rows(tr.data(), nv, nx);
  for (std::size_t j = 0; j < nx; ++j)
    for (std::size_t i = 0; i < nv; ++i) state_.at(j, i) = tr[i * nx + j].real();
}

void Simulator::kick_v(double dt) {
  auto e = poisson_solve(state_);
  const std::size_t nx = state_.n_x, nv = state_.v_grid.size();
  const double dv = state_.v_grid.dv();
  double emax = 0;
  for (double x : e) emax = std::max(emax, std::fabs(x));
  require(dt * emax / dv <= opt_.accuracy_bound, Err::StepTooLarge,
          "simulator: dt max|E|/dv beyond the accuracy bound");

  std::vector<double> row(nv), out(nv);
  double fmax = 0;
  for (double x : state_.f) fmax = std::max(fmax, x);
  for (std::size_t j = 0; j < nx; ++j) {
    // departure point v + E dt; constant shift per column
    double shift = e[j] * dt;
    for (std::size_t i = 0; i < nv; ++i) row[i] = state_.at(j, i);
    if (opt_.v_interp == SimOptions::VInterp::lagrange6) {
      double t = shift / dv;
      double tf = std::floor(t);
      auto base_off = static_cast<long>(tf) - 2;
      double frac = t - tf;
      double wts[6];
      for (int m = 0; m < 6; ++m) {
        double w = 1.0;
        for (int r = 0; r < 6; ++r) {
          if (r == m) continue;
          w *= (frac + 2.0 - static_cast<double>(r)) / static_cast<double>(m - r);
        }
        wts[m] = w;
      }
      for (std::size_t i = 0; i < nv; ++i) {
        long b = static_cast<long>(i) + base_off;
        double s = 0;
        if (b >= 0 && b + 5 < static_cast<long>(nv)) {
          const double* p = row.data() + b;
          s = wts[0] * p[0] + wts[1] * p[1] + wts[2] * p[2] + wts[3] * p[3] + wts[4] * p[4] +
              wts[5] * p[5];
        } else {
          for (int m = 0; m < 6; ++m) {
            long idx = b + m;
            if (idx >= 0 && idx < static_cast<long>(nv)) s += wts[m] * row[static_cast<std::size_t>(idx)];
          }
        }
        out[i] = s;
      }
    } else {
      // natural cubic spline through the column, evaluated at the shift
      std::vector<double> m2(nv, 0.0), diag(nv, 2.0), rhs(nv, 0.0);
      for (std::size_t i = 1; i + 1 < nv; ++i)
        rhs[i] = 6.0 * (row[i + 1] - 2.0 * row[i] + row[i - 1]) / (dv * dv);
      // Thomas solve, half off-diagonals
      std::vector<double> c(nv, 0.5);
      c[0] = 0;
      for (std::size_t i = 1; i < nv; ++i) {
        double m = 0.5 / diag[i - 1];
        diag[i] -= m * c[i - 1];
        rhs[i] -= m * rhs[i - 1];
      }
      m2[nv - 1] = rhs[nv - 1] / diag[nv - 1];
      for (std::size_t i = nv - 1; i-- > 0;) m2[i] = (rhs[i] - c[i] * m2[i + 1]) / diag[i];
      for (std::size_t i = 0; i < nv; ++i) {
        double u = state_.v_grid.node(i) + shift;
        if (u < state_.v_grid.v_min() || u > state_.v_grid.v_max()) {
          out[i] = 0;
          continue;
        }
        auto i0 = std::min(static_cast<std::size_t>((u - state_.v_grid.v_min()) / dv), nv - 2);
        double a = (state_.v_grid.node(i0 + 1) - u) / dv, bb = (u - state_.v_grid.node(i0)) / dv;
        out[i] = a * row[i0] + bb * row[i0 + 1] +
                 ((a * a * a - a) * m2[i0] + (bb * bb * bb - bb) * m2[i0 + 1]) * dv * dv / 6.0;
      }
    }
    for (std::size_t i = 0; i < nv; ++i) {
      if (out[i] < -1e-12 * fmax) ++undershoots_;
      state_.at(j, i) = out[i];
    }
  }
}

void Simulator::step() { step_signed(opt_.dt); }

void Simulator::step_signed(double dt) {
  if (dt == 0.0) return;
  advect_x(0.5 * dt);
  if (opt_.coupling) kick_v(dt);
  advect_x(0.5 * dt);
}

SimDiagnostics Simulator::evolve(std::size_t n_steps, std::size_t stride,
                                 const std::vector<double>& reference,
                                 const std::vector<double>& s_indices) {
  require(stride >= 1, Err::BadArgument, "evolve: stride must be positive");
  SimDiagnostics d;
  d.s_indices = s_indices;
  d.dist.resize(s_indices.size());

  auto record = [&](double t) {
    const std::size_t nx = state_.n_x, nv = state_.v_grid.size();
    double mass = 0, mom = 0, kin = 0, f2 = 0;
    for (std::size_t j = 0; j < nx; ++j)
      for (std::size_t i = 0; i < nv; ++i) {
        double w = state_.dx() * trapz_weight(state_.v_grid, i);
        double v = state_.v_grid.node(i), fv = state_.at(j, i);
        mass += w * fv;
        mom += w * v * fv;
        kin += w * v * v * fv;
        f2 += w * fv * fv;
      }
    auto e = poisson_solve(state_);
    double e2 = 0;
    for (double x : e) e2 += state_.dx() * x * x;
    d.t.push_back(t);
    d.mass.push_back(mass);
    d.momentum.push_back(mom);
    d.energy.push_back(kin + e2);
    d.e_l2.push_back(std::sqrt(e2));
    d.f_l2.push_back(std::sqrt(f2));
    for (std::size_t si = 0; si < s_indices.size(); ++si)
      d.dist[si].push_back(reference.empty() ? 0.0
                                             : distance_tracker(state_, reference, s_indices[si]));
  };

  record(0.0);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    step();
    if (n % stride == 0) record(opt_.dt * static_cast<double>(n));
  }
  d.undershoot_events = undershoots_;
  return d;
}

Field2D perturbed_equilibrium(const VelocityProfile& profile, double T, std::size_t n_x, double eps,
                              int mode) {
  require(std::fabs(profile.mass() - 1.0) < 1e-10, Err::NeutralityViolated,
          "perturbed_equilibrium: profile must have unit mass");
  Field2D f;
  f.period = T;
  f.n_x = n_x;
  f.v_grid = profile.grid();
  f.f.resize(n_x * profile.grid().size());
  for (std::size_t j = 0; j < n_x; ++j) {
    double c = 1.0 + eps * std::cos(2.0 * M_PI * mode * f.x_node(j) / T);
    for (std::size_t i = 0; i < profile.grid().size(); ++i) f.at(j, i) = c * profile.values()[i];
  }
  return f;
}

double distance_tracker(const Field2D& f, const std::vector<double>& reference, double s) {
  require(s <= 4.0, Err::BadArgument, "distance_tracker: s must stay at or below 4");
  require(reference.size() == f.v_grid.size(), Err::GridMismatch,
          "distance_tracker: reference grid mismatch");
  double acc = 0;
  std::vector<double> diff(f.v_grid.size());
  for (std::size_t j = 0; j < f.n_x; ++j) {
    for (std::size_t i = 0; i < f.v_grid.size(); ++i) diff[i] = f.at(j, i) - reference[i];
    double n = hs_norm_v(f.v_grid, diff, s);
    acc += f.dx() * n * n;
  }
  return std::sqrt(acc);
}

double density_bound_ratio(const Field2D& f) {
  double fmax = 0;
  for (double x : f.f) fmax = std::max(fmax, x);
  double worst = 0;
  for (std::size_t j = 0; j < f.n_x; ++j) {
    double rho = 0, kin = 0;
    for (std::size_t i = 0; i < f.v_grid.size(); ++i) {
      double w = trapz_weight(f.v_grid, i), v = f.v_grid.node(i);
      rho += w * f.at(j, i);
      kin += w * v * v * f.at(j, i);
    }
    double bound = 3.0 * std::pow(fmax, 2.0 / 3.0) * std::cbrt(kin);
    if (bound > 0) worst = std::max(worst, rho / bound);
  }
  return worst;
}

void save_state(const Field2D& f, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  char buf[128];
  std::ofstream out(dir + "/f.csv");
  require(out.good(), Err::Io, "cannot write " + dir + "/f.csv");
  out << "x,v,f\n";
  for (std::size_t j = 0; j < f.n_x; ++j)
    for (std::size_t i = 0; i < f.v_grid.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", f.x_node(j), f.v_grid.node(i),
                    f.at(j, i));
      out << buf;
    }
  nlohmann::json meta;
  meta["period"] = f.period;
  meta["n_x"] = f.n_x;
  meta["v_min"] = f.v_grid.v_min();
  meta["v_max"] = f.v_grid.v_max();
  meta["n_v"] = f.v_grid.size();
  std::ofstream mo(dir + "/meta.json");
  require(mo.good(), Err::Io, "cannot write " + dir + "/meta.json");
  mo << meta.dump(2) << "\n";
}

Field2D load_state(const std::string& dir) {
  std::ifstream mi(dir + "/meta.json");
  require(mi.good(), Err::Io, "cannot read " + dir + "/meta.json");
  nlohmann::json meta = nlohmann::json::parse(mi);
  Field2D f;
  f.period = meta.at("period").get<double>();
  f.n_x = meta.at("n_x").get<std::size_t>();
  f.v_grid = VelocityGrid(meta.at("v_min").get<double>(), meta.at("v_max").get<double>(),
                          meta.at("n_v").get<std::size_t>());
  f.f.assign(f.n_x * f.v_grid.size(), 0.0);
  std::ifstream in(dir + "/f.csv");
  require(in.good(), Err::Io, "cannot read " + dir + "/f.csv");
  std::string line;
  std::getline(in, line);
  for (std::size_t j = 0; j < f.n_x; ++j)
    for (std::size_t i = 0; i < f.v_grid.size(); ++i) {
      require(static_cast<bool>(std::getline(in, line)), Err::Io, "state csv truncated");
      auto p2 = line.rfind(',');
      f.at(j, i) = std::stod(line.substr(p2 + 1));
    }
  return f;
}

void save_diagnostics_csv(const SimDiagnostics& d, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), Err::Io, "cannot write " + path);
  out << "t,mass,momentum,energy,e_l2,f_l2";
  for (double s : d.s_indices) out << ",dist_s" << s;
  out << "\n";
  char buf[64];
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    auto cell = [&](double x) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      return std::string(buf);
    };
    out << cell(d.t[i]) << ',' << cell(d.mass[i]) << ',' << cell(d.momentum[i]) << ','
        << cell(d.energy[i]) << ',' << cell(d.e_l2[i]) << ',' << cell(d.f_l2[i]);
    for (const auto& col : d.dist) out << ',' << cell(col[i]);
    out << "\n";
  }
}

} // namespace vpk

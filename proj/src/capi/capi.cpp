#include "vpkit/vpkit.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "core/bgk.hpp"
#include "core/landau.hpp"
#include "core/penrose.hpp"
#include "core/profiles.hpp"
#include "core/quadrature.hpp"
#include "core/sim.hpp"

using namespace vpk;

struct vpk_profile {
  VelocityProfile p;
};
struct vpk_report {
  StabilityReport r;
};
struct vpk_series {
  FieldTimeSeries s;
};
struct vpk_wave {
  BgkWave w;
};
struct vpk_sim {
  Simulator sim;
  SimDiagnostics diag;
};

namespace {

thread_local std::string g_error;

vpk_status status_of(const Error& e) {
  switch (e.code()) {
    case Err::NoConvergence:
    case Err::RootCollapsedToRealAxis:
    case Err::TargetNotReachable:
    case Err::BracketNotFound:
    case Err::NotACenter:
    case Err::OrbitEscapesWell:
    case Err::UnstableMode:
    case Err::DenominatorNearZero:
      return VPK_ERR_NUMERICAL;
    case Err::Io:
      return VPK_ERR_IO;
    default:
      return VPK_ERR_ARGUMENT;
  }
}

template <class F>
vpk_status guarded(F&& f) {
  try {
    f();
    return VPK_OK;
  } catch (const Error& e) {
    g_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_error = e.what();
    return VPK_ERR_ARGUMENT;
  }
}

template <class T, class F>
T* guarded_new(F&& f) {
  try {
    return new T{f()};
  } catch (const Error& e) {
    g_error = e.what();
    return nullptr;
  } catch (const std::exception& e) {
    g_error = e.what();
    return nullptr;
  }
}

VelocityGrid grid_from_samples(const double* v, size_t n) {
  require(n >= 16, Err::BadArgument, "need at least 16 samples");
  return VelocityGrid(v[0], v[n - 1], n);
}

} // namespace

extern "C" {

const char* vpk_last_error(void) { return g_error.c_str(); }

/* ---------------- profiles ---------------- */

vpk_profile* vpk_profile_named(const char* name, double param, double v_min, double v_max,
                               size_t n_v) {
  return guarded_new<vpk_profile>([&] {
    return named_profile(name, param, VelocityGrid(v_min, v_max, n_v), default_options(name));
  });
}

vpk_profile* vpk_profile_named_default(const char* name, double param, size_t n_v) {
  return guarded_new<vpk_profile>(
      [&] { return named_profile(name, param, default_grid(name, param, n_v), default_options(name)); });
}

vpk_profile* vpk_profile_load_csv(const char* path) {
  return guarded_new<vpk_profile>([&] { return load_profile_csv(path); });
}

void vpk_profile_free(vpk_profile* p) { delete p; }

size_t vpk_profile_size(const vpk_profile* p) { return p ? p->p.grid().size() : 0; }

vpk_status vpk_profile_nodes(const vpk_profile* p, double* out) {
  return guarded([&] {
    require(p && out, Err::BadArgument, "null argument");
    for (std::size_t i = 0; i < p->p.grid().size(); ++i) out[i] = p->p.grid().node(i);
  });
}

vpk_status vpk_profile_values(const vpk_profile* p, double* out) {
  return guarded([&] {
    require(p && out, Err::BadArgument, "null argument");
    std::memcpy(out, p->p.values().data(), p->p.values().size() * sizeof(double));
  });
}

double vpk_profile_mass(const vpk_profile* p) { return p ? p->p.mass() : NAN; }
double vpk_profile_second_moment(const vpk_profile* p) { return p ? p->p.second_moment() : NAN; }

vpk_status vpk_profile_save_csv(const vpk_profile* p, const char* path) {
  return guarded([&] {
    require(p && path, Err::BadArgument, "null argument");
    save_profile_csv(p->p, path);
  });
}

vpk_profile* vpk_profile_normalize(const vpk_profile* p) {
  return guarded_new<vpk_profile>([&] {
    require(p, Err::BadArgument, "null profile");
    return normalize(p->p);
  });
}

vpk_profile* vpk_profile_mollify(const vpk_profile* p, double delta1) {
  return guarded_new<vpk_profile>([&] {
    require(p, Err::BadArgument, "null profile");
    return mollify(p->p, delta1);
  });
}

vpk_profile* vpk_profile_symmetrize(const vpk_profile* p, double c, double delta2) {
  return guarded_new<vpk_profile>([&] {
    require(p, Err::BadArgument, "null profile");
    return symmetrize_near(p->p, c, delta2);
  });
}

vpk_profile* vpk_profile_modified_family(const vpk_profile* p, int positive_nu, double v0,
                                         double gamma, double delta) {
  return guarded_new<vpk_profile>([&] {
    require(p, Err::BadArgument, "null profile");
    BumpFamily F{positive_nu ? BumpFamily::Sign::positive_nu : BumpFamily::Sign::negative_nu, v0};
    return modified_family(p->p, F, gamma, delta);
  });
}

vpk_profile* vpk_profile_rescale(const vpk_profile* p, double center, double delta) {
  return guarded_new<vpk_profile>([&] {
    require(p, Err::BadArgument, "null profile");
    return rescale_profile(p->p, center, delta);
  });
}

size_t vpk_profile_extrema_count(const vpk_profile* p) {
  if (!p) return 0;
  try {
    return find_extrema(p->p).size();
  } catch (const std::exception& e) {
    g_error = e.what();
    return 0;
  }
}

vpk_status vpk_profile_extrema(const vpk_profile* p, double* v, int* is_max, int* degenerate) {
  return guarded([&] {
    require(p, Err::BadArgument, "null profile");
    auto ex = find_extrema(p->p);
    for (std::size_t i = 0; i < ex.size(); ++i) {
      if (v) v[i] = ex[i].v;
      if (is_max) is_max[i] = ex[i].is_max ? 1 : 0;
      if (degenerate) degenerate[i] = ex[i].degenerate ? 1 : 0;
    }
  });
}

/* ---------------- quadrature ---------------- */

vpk_status vpk_pv_integral(const double* v, const double* g, size_t n, double c, double* out) {
  return guarded([&] {
    require(v && g && out, Err::BadArgument, "null argument");
    auto grid = grid_from_samples(v, n);
    *out = pv_integral(grid, std::vector<double>(g, g + n), c);
  });
}

vpk_status vpk_sobolev_norm(const double* v, const double* g, size_t n, double s, double p,
                            int use_gagliardo, double* out) {
  return guarded([&] {
    require(v && g && out, Err::BadArgument, "null argument");
    auto grid = grid_from_samples(v, n);
    SobolevSpec spec{s, p,
                     use_gagliardo ? SobolevSpec::Method::gagliardo
                                   : SobolevSpec::Method::spectral_p2};
    *out = sobolev_norm(grid, std::vector<double>(g, g + n), spec);
  });
}

/* ---------------- linear stability ---------------- */

vpk_report* vpk_penrose(const vpk_profile* p) {
  return guarded_new<vpk_report>([&] {
    require(p, Err::BadArgument, "null profile");
    return critical_period(p->p);
  });
}

void vpk_report_free(vpk_report* r) { delete r; }
double vpk_report_t0(const vpk_report* r) { return r ? r->r.t0 : NAN; }
double vpk_report_kmax(const vpk_report* r) { return r ? r->r.k_max : NAN; }
size_t vpk_report_extrema_count(const vpk_report* r) { return r ? r->r.extrema.size() : 0; }

vpk_status vpk_report_extremum(const vpk_report* r, size_t i, double* v, double* integral,
                               int* is_max, int* degenerate) {
  return guarded([&] {
    require(r && i < r->r.extrema.size(), Err::BadArgument, "bad extremum index");
    const auto& e = r->r.extrema[i];
    if (v) *v = e.v;
    if (integral) *integral = e.integral;
    if (is_max) *is_max = e.is_max ? 1 : 0;
    if (degenerate) *degenerate = e.degenerate ? 1 : 0;
  });
}

size_t vpk_report_interval_count(const vpk_report* r) { return r ? r->r.unstable_k.size() : 0; }

vpk_status vpk_report_interval(const vpk_report* r, size_t i, double* k_lo, double* k_hi) {
  return guarded([&] {
    require(r && i < r->r.unstable_k.size(), Err::BadArgument, "bad interval index");
    if (k_lo) *k_lo = r->r.unstable_k[i].first;
    if (k_hi) *k_hi = r->r.unstable_k[i].second;
  });
}

size_t vpk_report_gap_count(const vpk_report* r) { return r ? r->r.gaps.size() : 0; }

vpk_status vpk_report_gap(const vpk_report* r, size_t i, double* k_lo, double* k_hi) {
  return guarded([&] {
    require(r && i < r->r.gaps.size(), Err::BadArgument, "bad gap index");
    if (k_lo) *k_lo = r->r.gaps[i].first;
    if (k_hi) *k_hi = r->r.gaps[i].second;
  });
}

vpk_status vpk_report_json(const vpk_report* r, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(r, Err::BadArgument, "null report");
    auto s = r->r.to_json();
    if (needed) *needed = s.size() + 1;
    if (buf) {
      require(cap >= s.size() + 1, Err::BadArgument, "buffer too small");
      std::memcpy(buf, s.c_str(), s.size() + 1);
    }
  });
}

vpk_status vpk_nyquist(const vpk_profile* p, double* re, double* im) {
  return guarded([&] {
    require(p && re && im, Err::BadArgument, "null argument");
    auto ny = nyquist(p->p);
    for (std::size_t i = 0; i < ny.z.size(); ++i) {
      re[i] = ny.z[i].real();
      im[i] = ny.z[i].imag();
    }
  });
}

vpk_status vpk_dispersion_root(const vpk_profile* p, double k, double seed_re, double seed_im,
                               double* c_re, double* c_im, double* growth_rate, double* residual,
                               int* neutral) {
  return guarded([&] {
    require(p, Err::BadArgument, "null profile");
    auto r = dispersion_root(p->p, k, {seed_re, seed_im});
    if (c_re) *c_re = r.c.real();
    if (c_im) *c_im = r.c.imag();
    if (growth_rate) *growth_rate = r.growth_rate;
    if (residual) *residual = r.residual;
    if (neutral) *neutral = r.neutral ? 1 : 0;
  });
}

vpk_profile* vpk_unstable_neighbor(const vpk_profile* p, double T, double s, double epsilon,
                                   vpk_neighbor_info* info) {
  return guarded_new<vpk_profile>([&] {
    require(p, Err::BadArgument, "null profile");
    auto nb = unstable_neighbor(p->p, T, s, epsilon);
    if (info) {
      info->gamma = nb.gamma;
      info->delta_bump = nb.delta_bump;
      info->delta_rescale = nb.delta_rescale;
      info->dist_l1 = nb.dist_l1;
      info->dist_energy = nb.dist_energy;
      info->dist_wsp = nb.dist_wsp;
      info->dist_total = nb.dist_total;
      info->root_re = nb.root.c.real();
      info->root_im = nb.root.c.imag();
      info->growth_rate = nb.root.growth_rate;
    }
    return std::move(nb.profile);
  });
}

/* ---------------- Landau damping ---------------- */

vpk_series* vpk_landau_field(const vpk_profile* f0, const vpk_profile* data, double k, double t_max,
                             size_t n_t) {
  return guarded_new<vpk_series>([&] {
    require(f0 && data, Err::BadArgument, "null profile");
    auto mode = make_mode_data(k, f0->p.grid(), [&](double v) {
      return std::complex<double>(data->p.value(v), 0.0);
    });
    return landau_field(f0->p, mode, t_max, n_t);
  });
}

vpk_series* vpk_linearized_evolve(const vpk_profile* f0, const vpk_profile* data, double k,
                                  double dt, size_t n_steps, size_t stride, int coupling) {
  return guarded_new<vpk_series>([&] {
    require(f0 && data, Err::BadArgument, "null profile");
    auto mode = make_mode_data(k, f0->p.grid(), [&](double v) {
      return std::complex<double>(data->p.value(v), 0.0);
    });
    EvolveOptions opt;
    opt.coupling = coupling != 0;
    opt.stride = stride;
    return linearized_evolve(f0->p, mode, dt, n_steps, opt);
  });
}

void vpk_series_free(vpk_series* s) { delete s; }
size_t vpk_series_size(const vpk_series* s) { return s ? s->s.t.size() : 0; }

vpk_status vpk_series_get(const vpk_series* s, double* t, double* re, double* im) {
  return guarded([&] {
    require(s, Err::BadArgument, "null series");
    for (std::size_t i = 0; i < s->s.t.size(); ++i) {
      if (t) t[i] = s->s.t[i];
      if (re) re[i] = s->s.e[i].real();
      if (im) im[i] = s->s.e[i].imag();
    }
  });
}

vpk_status vpk_series_save_csv(const vpk_series* s, const char* path) {
  return guarded([&] {
    require(s && path, Err::BadArgument, "null argument");
    std::ofstream out(path);
    require(out.good(), Err::Io, std::string("cannot write ") + path);
    out << "t,re_e,im_e,abs_e\n";
    char buf[128];
    for (std::size_t i = 0; i < s->s.t.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s->s.t[i], s->s.e[i].real(),
                    s->s.e[i].imag(), std::abs(s->s.e[i]));
      out << buf;
    }
  });
}

vpk_status vpk_fit_decay(const vpk_series* s, double t_lo, double t_hi, double* exponent,
                         double* prefactor, double* r_squared) {
  return guarded([&] {
    require(s, Err::BadArgument, "null series");
    auto fit = fit_decay(s->s, t_lo, t_hi);
    if (exponent) *exponent = fit.exponent;
    if (prefactor) *prefactor = fit.prefactor;
    if (r_squared) *r_squared = fit.r_squared;
  });
}

vpk_status vpk_fit_exponential(const vpk_series* s, double t_lo, double t_hi, double* rate) {
  return guarded([&] {
    require(s && rate, Err::BadArgument, "null argument");
    *rate = fit_exponential_rate(s->s, t_lo, t_hi);
  });
}

vpk_status vpk_integral_decay_norm(const vpk_series* const* modes, size_t n_modes, double s_x,
                                   double s_v, double* out) {
  return guarded([&] {
    require(modes && out, Err::BadArgument, "null argument");
    std::vector<FieldTimeSeries> list;
    for (size_t i = 0; i < n_modes; ++i) {
      require(modes[i], Err::BadArgument, "null series in list");
      list.push_back(modes[i]->s);
    }
    *out = integral_decay_norm(list, s_x, s_v);
  });
}

/* ---------------- BGK waves ---------------- */

vpk_wave* vpk_bgk_build(const vpk_profile* p, double T, double speed, double amplitude,
                        double gamma, double epsilon, double s, size_t n_x) {
  return guarded_new<vpk_wave>([&] {
    require(p, Err::BadArgument, "null profile");
    BgkOptions opt;
    if (amplitude > 0) opt.amplitude = amplitude;
    opt.gamma = gamma;
    if (epsilon > 0) opt.epsilon = epsilon;
    if (s > 0) opt.s = s;
    if (n_x >= 8) opt.n_x = n_x;
    return build_bgk(p->p, T, speed, opt);
  });
}

void vpk_wave_free(vpk_wave* w) { delete w; }

vpk_status vpk_wave_get_info(const vpk_wave* w, vpk_wave_info* info) {
  return guarded([&] {
    require(w && info, Err::BadArgument, "null argument");
    info->period = w->w.period;
    info->speed = w->w.speed;
    info->amplitude = w->w.amplitude;
    info->gamma = w->w.spec.gamma;
    info->delta = w->w.spec.delta;
    info->case_id = w->w.spec.case_id;
    info->r = w->w.spec.r;
    info->h_prime0 = w->w.h_prime0;
    info->beta_h2 = w->w.beta_h2;
    info->vlasov_residual = w->w.vlasov_residual;
    info->poisson_residual = w->w.poisson_residual;
    info->dist_l1 = w->w.distance.l1;
    info->dist_energy = w->w.distance.energy_l1;
    info->dist_wsp = w->w.distance.wsp;
  });
}

size_t vpk_wave_nx(const vpk_wave* w) { return w ? w->w.x.size() : 0; }

vpk_status vpk_wave_arrays(const vpk_wave* w, double* x, double* beta, double* e) {
  return guarded([&] {
    require(w, Err::BadArgument, "null wave");
    for (std::size_t j = 0; j < w->w.x.size(); ++j) {
      if (x) x[j] = w->w.x[j];
      if (beta) beta[j] = w->w.beta[j];
      if (e) e[j] = w->w.e_field[j];
    }
  });
}

vpk_status vpk_wave_save(const vpk_wave* w, const char* dir) {
  return guarded([&] {
    require(w && dir, Err::BadArgument, "null argument");
    save_wave(w->w, dir);
  });
}

vpk_status vpk_wave_verify(const vpk_wave* w, double* vlasov_residual, double* poisson_residual) {
  return guarded([&] {
    require(w, Err::BadArgument, "null wave");
    auto [vr, pr] = verify_steady(w->w);
    if (vlasov_residual) *vlasov_residual = vr;
    if (poisson_residual) *poisson_residual = pr;
  });
}

/* ---------------- simulation ---------------- */

vpk_sim* vpk_sim_equilibrium(const vpk_profile* p, double T, size_t n_x, double eps, int mode,
                             double dt, int coupling) {
  return guarded_new<vpk_sim>([&] {
    require(p, Err::BadArgument, "null profile");
    SimOptions opt;
    opt.dt = dt;
    opt.coupling = coupling != 0;
    auto state = perturbed_equilibrium(p->p, T, n_x, eps, mode);
    return vpk_sim{Simulator(std::move(state), opt), {}};
  });
}

vpk_sim* vpk_sim_from_wave(const vpk_wave* w, double dt) {
  return guarded_new<vpk_sim>([&] {
    require(w, Err::BadArgument, "null wave");
    SimOptions opt;
    opt.dt = dt;
    opt.frame_speed = w->w.speed;
    return vpk_sim{Simulator(w->w.f, opt), {}};
  });
}

void vpk_sim_free(vpk_sim* s) { delete s; }

vpk_status vpk_sim_run(vpk_sim* s, size_t n_steps, size_t stride, const vpk_profile* reference,
                       const double* s_list, size_t n_s) {
  return guarded([&] {
    require(s, Err::BadArgument, "null simulator");
    std::vector<double> ref;
    if (reference) {
      const auto& vg = s->sim.state().v_grid;
      ref.resize(vg.size());
      for (std::size_t i = 0; i < vg.size(); ++i) ref[i] = reference->p.value(vg.node(i));
    }
    std::vector<double> sl(s_list, s_list + n_s);
    s->diag = s->sim.evolve(n_steps, stride, ref, sl);
  });
}

size_t vpk_sim_diag_rows(const vpk_sim* s) { return s ? s->diag.t.size() : 0; }

vpk_status vpk_sim_diag_column(const vpk_sim* s, const char* name, double* out) {
  return guarded([&] {
    require(s && name && out, Err::BadArgument, "null argument");
    const std::vector<double>* col = nullptr;
    std::string n(name);
    if (n == "t") col = &s->diag.t;
    else if (n == "mass") col = &s->diag.mass;
    else if (n == "momentum") col = &s->diag.momentum;
    else if (n == "energy") col = &s->diag.energy;
    else if (n == "e_l2") col = &s->diag.e_l2;
    else if (n == "f_l2") col = &s->diag.f_l2;
    else if (n.rfind("dist", 0) == 0) {
      auto idx = static_cast<std::size_t>(std::stoul(n.substr(4)));
      require(idx < s->diag.dist.size(), Err::BadArgument, "bad distance column");
      col = &s->diag.dist[idx];
    }
    require(col != nullptr, Err::BadArgument, "unknown diagnostic column");
    std::memcpy(out, col->data(), col->size() * sizeof(double));
  });
}

vpk_status vpk_sim_diag_save_csv(const vpk_sim* s, const char* path) {
  return guarded([&] {
    require(s && path, Err::BadArgument, "null argument");
    save_diagnostics_csv(s->diag, path);
  });
}

vpk_status vpk_sim_save_state(const vpk_sim* s, const char* dir) {
  return guarded([&] {
    require(s && dir, Err::BadArgument, "null argument");
    save_state(s->sim.state(), dir);
  });
}

} /* extern "C" */

/* vpkit: 1D Vlasov-Poisson analysis toolkit.
 *
 * C interface over the C++ core: opaque handles, status codes, caller-owned
 * buffers. Every function that can fail returns either a NULL handle or a
 * nonzero vpk_status; vpk_last_error() describes the most recent failure of
 * the calling thread.
 */
#ifndef VPKIT_H
#define VPKIT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vpk_status {
  VPK_OK = 0,
  VPK_ERR_ARGUMENT = 1,  /* bad input, unresolvable request, grid mismatch */
  VPK_ERR_NUMERICAL = 2, /* no convergence, bracket/orbit failures */
  VPK_ERR_IO = 3
} vpk_status;

const char* vpk_last_error(void);

/* ---------------- profiles ---------------- */

typedef struct vpk_profile vpk_profile;

/* maxwellian | double_gaussian(v0) | lorentzian | weizner(alpha) |
 * gaussian(sigma) | hat(width) */
vpk_profile* vpk_profile_named(const char* name, double param, double v_min, double v_max,
                               size_t n_v);
/* same, on the profile's preferred grid and tail options */
vpk_profile* vpk_profile_named_default(const char* name, double param, size_t n_v);
vpk_profile* vpk_profile_load_csv(const char* path);
void vpk_profile_free(vpk_profile* p);

size_t vpk_profile_size(const vpk_profile* p);
vpk_status vpk_profile_nodes(const vpk_profile* p, double* out);
vpk_status vpk_profile_values(const vpk_profile* p, double* out);
double vpk_profile_mass(const vpk_profile* p);
double vpk_profile_second_moment(const vpk_profile* p);
vpk_status vpk_profile_save_csv(const vpk_profile* p, const char* path);

vpk_profile* vpk_profile_normalize(const vpk_profile* p);
vpk_profile* vpk_profile_mollify(const vpk_profile* p, double delta1);
vpk_profile* vpk_profile_symmetrize(const vpk_profile* p, double c, double delta2);
vpk_profile* vpk_profile_modified_family(const vpk_profile* p, int positive_nu, double v0,
                                         double gamma, double delta);
vpk_profile* vpk_profile_rescale(const vpk_profile* p, double center, double delta);

/* extrema of the sampled profile; arrays sized by the returned count on the
 * first call with NULL outputs */
size_t vpk_profile_extrema_count(const vpk_profile* p);
vpk_status vpk_profile_extrema(const vpk_profile* p, double* v, int* is_max, int* degenerate);

/* ---------------- quadrature on raw samples ---------------- */

/* principal value of integral g/(v - c) over a uniform grid v[0..n) */
vpk_status vpk_pv_integral(const double* v, const double* g, size_t n, double c, double* out);
/* W^{s,p} norm; use_gagliardo != 0 selects the double-integral route (p > 1),
 * otherwise the spectral p = 2 norm */
vpk_status vpk_sobolev_norm(const double* v, const double* g, size_t n, double s, double p,
                            int use_gagliardo, double* out);

/* ---------------- linear stability ---------------- */

typedef struct vpk_report vpk_report;

vpk_report* vpk_penrose(const vpk_profile* p);
void vpk_report_free(vpk_report* r);
double vpk_report_t0(const vpk_report* r); /* INFINITY when stable at all periods */
double vpk_report_kmax(const vpk_report* r);
size_t vpk_report_extrema_count(const vpk_report* r);
vpk_status vpk_report_extremum(const vpk_report* r, size_t i, double* v, double* integral,
                               int* is_max, int* degenerate);
size_t vpk_report_interval_count(const vpk_report* r);
vpk_status vpk_report_interval(const vpk_report* r, size_t i, double* k_lo, double* k_hi);
size_t vpk_report_gap_count(const vpk_report* r);
vpk_status vpk_report_gap(const vpk_report* r, size_t i, double* k_lo, double* k_hi);
/* JSON serialization; *needed receives the full length including the
 * terminator, buf may be NULL to query the size */
vpk_status vpk_report_json(const vpk_report* r, char* buf, size_t cap, size_t* needed);

/* boundary values Z(xi + i0) on the profile grid */
vpk_status vpk_nyquist(const vpk_profile* p, double* re, double* im);

vpk_status vpk_dispersion_root(const vpk_profile* p, double k, double seed_re, double seed_im,
                               double* c_re, double* c_im, double* growth_rate, double* residual,
                               int* neutral);

typedef struct vpk_neighbor_info {
  double gamma, delta_bump, delta_rescale;
  double dist_l1, dist_energy, dist_wsp, dist_total;
  double root_re, root_im, growth_rate;
} vpk_neighbor_info;

/* nearby homogeneous state linearly unstable at x-period T */
vpk_profile* vpk_unstable_neighbor(const vpk_profile* p, double T, double s, double epsilon,
                                   vpk_neighbor_info* info);

/* ---------------- linear Landau damping ---------------- */

typedef struct vpk_series vpk_series;

/* data: real mode profile g(v) sampled on the same grid as f0 */
vpk_series* vpk_landau_field(const vpk_profile* f0, const vpk_profile* data, double k, double t_max,
                             size_t n_t);
vpk_series* vpk_linearized_evolve(const vpk_profile* f0, const vpk_profile* data, double k,
                                  double dt, size_t n_steps, size_t stride, int coupling);
void vpk_series_free(vpk_series* s);
size_t vpk_series_size(const vpk_series* s);
vpk_status vpk_series_get(const vpk_series* s, double* t, double* re, double* im);
vpk_status vpk_series_save_csv(const vpk_series* s, const char* path);

vpk_status vpk_fit_decay(const vpk_series* s, double t_lo, double t_hi, double* exponent,
                         double* prefactor, double* r_squared);
vpk_status vpk_fit_exponential(const vpk_series* s, double t_lo, double t_hi, double* rate);
vpk_status vpk_integral_decay_norm(const vpk_series* const* modes, size_t n_modes, double s_x,
                                   double s_v, double* out);

/* ---------------- BGK waves ---------------- */

typedef struct vpk_wave vpk_wave;

/* gamma <= 0 derives the bump size from epsilon via the L1 mass rule */
vpk_wave* vpk_bgk_build(const vpk_profile* p, double T, double speed, double amplitude,
                        double gamma, double epsilon, double s, size_t n_x);
void vpk_wave_free(vpk_wave* w);

typedef struct vpk_wave_info {
  double period, speed, amplitude;
  double gamma, delta;
  int case_id;
  double r; /* orbit turning point */
  double h_prime0, beta_h2;
  double vlasov_residual, poisson_residual;
  double dist_l1, dist_energy, dist_wsp;
} vpk_wave_info;

vpk_status vpk_wave_get_info(const vpk_wave* w, vpk_wave_info* info);
size_t vpk_wave_nx(const vpk_wave* w);
vpk_status vpk_wave_arrays(const vpk_wave* w, double* x, double* beta, double* e);
vpk_status vpk_wave_save(const vpk_wave* w, const char* dir);
/* recomputed discrete steadiness residuals */
vpk_status vpk_wave_verify(const vpk_wave* w, double* vlasov_residual, double* poisson_residual);

/* ---------------- nonlinear simulation ---------------- */

typedef struct vpk_sim vpk_sim;

vpk_sim* vpk_sim_equilibrium(const vpk_profile* p, double T, size_t n_x, double eps, int mode,
                             double dt, int coupling);
/* evolve a constructed wave in its co-moving frame */
vpk_sim* vpk_sim_from_wave(const vpk_wave* w, double dt);
void vpk_sim_free(vpk_sim* s);

/* runs n_steps, recording every stride; reference may be NULL (distance
 * columns then read zero), s_list has n_s entries */
vpk_status vpk_sim_run(vpk_sim* s, size_t n_steps, size_t stride, const vpk_profile* reference,
                       const double* s_list, size_t n_s);
size_t vpk_sim_diag_rows(const vpk_sim* s);
/* name: t | mass | momentum | energy | e_l2 | f_l2 | dist<i> */
vpk_status vpk_sim_diag_column(const vpk_sim* s, const char* name, double* out);
vpk_status vpk_sim_diag_save_csv(const vpk_sim* s, const char* path);
vpk_status vpk_sim_save_state(const vpk_sim* s, const char* dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* VPKIT_H */

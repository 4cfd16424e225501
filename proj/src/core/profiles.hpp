#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/quadrature.hpp"

namespace vpk {

struct ProfileOptions {
  double tail_tol = 1e-12; // endpoint values must sit below this
};

/// Two-parameter bump used to move the Penrose integral of a profile. The
/// positive_nu case is the double Gaussian exp(-(v-v0)^2/2)+exp(-(v+v0)^2/2),
/// the negative_nu case the single Gaussian exp(-v^2/2).
struct BumpFamily {
  enum class Sign { positive_nu, negative_nu };
  Sign sign = Sign::positive_nu;
  double v0 = 3.0;

  double value(double v) const;
  double derivative(double v) const;
  double c0() const; // integral of F, closed form
  /// G with F(v) = G(v^2); entire in w, so valid for w < 0 as well.
  double energy_value(double w) const;
  /// P.V. integral of F'(v)/v dv, by quadrature on a dedicated grid.
  double pv_over_v() const;
};

/// Sampled homogeneous velocity distribution. Carries optional analytic
/// evaluation rules which the transform operations compose where exact;
/// consumers fall back to 6-point interpolation of the samples.
class VelocityProfile {
public:
  using Rule = std::function<double(double)>;

  VelocityProfile(VelocityGrid grid, std::vector<double> values, ProfileOptions opt = {});
  VelocityProfile(VelocityGrid grid, Rule f, Rule df, ProfileOptions opt = {});

  const VelocityGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double mass() const { return mass_; }
  double second_moment() const { return second_moment_; }
  const ProfileOptions& options() const { return opt_; }

  double value(double v) const;
  double derivative(double v) const;
  /// Node samples of f'; analytic rule when present, else 4th-order differences.
  std::vector<double> derivative_values() const;

  bool has_rule() const { return static_cast<bool>(rule_); }
  const Rule& rule() const { return rule_; }
  const Rule& rule_prime() const { return rule_prime_; }

  /// g with f(v) = g(v^2) for profiles even about 0, extended below w=0;
  /// set for analytic even named profiles and preserved by compatible ops.
  bool has_energy_rule() const { return static_cast<bool>(energy_rule_); }
  const Rule& energy_rule() const { return energy_rule_; }
  void set_energy_rule(Rule g) { energy_rule_ = std::move(g); }

  void set_rules(Rule f, Rule df) {
    rule_ = std::move(f);
    rule_prime_ = std::move(df);
  }

private:
  void validate();

  VelocityGrid grid_;
  std::vector<double> values_;
  ProfileOptions opt_;
  double mass_ = 0, second_moment_ = 0;
  Rule rule_, rule_prime_, energy_rule_;
};

VelocityProfile normalize(const VelocityProfile& p);
VelocityProfile mollify(const VelocityProfile& p, double delta1);
/// Makes the profile even about c on [c-delta2, c+delta2]; c is snapped to the
/// nearest grid node so the reflection is exact on the lattice.
VelocityProfile symmetrize_near(const VelocityProfile& p, double c, double delta2);
VelocityProfile modified_family(const VelocityProfile& p, const BumpFamily& F, double gamma, double delta);
VelocityProfile rescale_profile(const VelocityProfile& p, double center, double delta);

struct Extremum {
  double v = 0;
  bool is_max = false;
  double f_second = 0; // quadratic-fit curvature
  bool degenerate = false;
};

/// Interior extrema from sign changes of the discrete derivative, refined by a
/// local quadratic fit. Degeneracy threshold is relative to the largest
/// curvature found.
std::vector<Extremum> find_extrema(const VelocityProfile& p, double degeneracy_tol = 1e-6);

/// maxwellian | double_gaussian(v0) | lorentzian | weizner(alpha)
VelocityProfile named_profile(const std::string& name, double param, const VelocityGrid& grid,
                              ProfileOptions opt = {});
/// Grid and tail tolerance a named profile is comfortable on.
VelocityGrid default_grid(const std::string& name, double param, std::size_t n_v = 4096);
ProfileOptions default_options(const std::string& name);

void save_profile_csv(const VelocityProfile& p, const std::string& path);
VelocityProfile load_profile_csv(const std::string& path, ProfileOptions opt = {});

} // namespace vpk

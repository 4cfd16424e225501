#include "core/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vpk {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310005;
}

double BumpFamily::value(double v) const {
  if (sign == Sign::negative_nu) return std::exp(-0.5 * v * v);
  double a = v - v0, b = v + v0;
  return std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b);
}

double BumpFamily::derivative(double v) const {
  if (sign == Sign::negative_nu) return -v * std::exp(-0.5 * v * v);
  double a = v - v0, b = v + v0;
  return -a * std::exp(-0.5 * a * a) - b * std::exp(-0.5 * b * b);
}

double BumpFamily::c0() const { return sign == Sign::negative_nu ? kSqrt2Pi : 2.0 * kSqrt2Pi; }

double BumpFamily::energy_value(double w) const {
  if (w >= 0) return value(std::sqrt(w));
  if (sign == Sign::negative_nu && w > -4.0) return std::exp(-0.5 * w);
  // Below the separatrix the natural even continuation grows like
  // exp(|w|/2); the trapped branch is a free smooth choice, so use a bounded
  // C^2 extension: Taylor data at w = 0 composed with a saturating argument.
  double g0, g1, g2;
  if (sign == Sign::negative_nu) {
    g0 = 1.0;
    g1 = -0.5;
    g2 = 0.25;
    // blend continuously from exp(-w/2) at the switch depth
    double wref = -4.0;
    double e = std::exp(-0.5 * wref);
    const double L = 2.0;
    double t = L * std::tanh((w - wref) / L);
    return e * (1.0 + (-0.5) * t + 0.125 * t * t);
  }
  double e = std::exp(-0.5 * v0 * v0);
  g0 = 2.0 * e;
  g1 = e * (v0 * v0 - 1.0);
  g2 = e * (v0 * v0 * v0 * v0 / 6.0 - v0 * v0 + 0.5);
  const double L = 0.5;
  double t = L * std::tanh(w / L);
  return g0 + g1 * t + 0.5 * g2 * t * t;
}

double BumpFamily::pv_over_v() const {
  if (sign == Sign::negative_nu) return -kSqrt2Pi; // F'/v = -exp(-v^2/2) identically
  double half = v0 + 10.0;
  VelocityGrid g(-half, half, 16385);
  std::vector<double> dF(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) dF[i] = derivative(g.node(i));
  return pv_integral(g, dF, 0.0);
}

VelocityProfile::VelocityProfile(VelocityGrid grid, std::vector<double> values, ProfileOptions opt)
    : grid_(grid), values_(std::move(values)), opt_(opt) {
  validate();
}

VelocityProfile::VelocityProfile(VelocityGrid grid, Rule f, Rule df, ProfileOptions opt)
    : grid_(grid), opt_(opt), rule_(std::move(f)), rule_prime_(std::move(df)) {
  values_.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) values_[i] = rule_(grid_.node(i));
  validate();
}

void VelocityProfile::validate() {
  require(values_.size() == grid_.size(), Err::GridMismatch, "profile: sample count mismatch");
  double peak = 0;
  for (double v : values_) {
    require(std::isfinite(v), Err::NonFiniteSample, "profile: non-finite sample");
    peak = std::max(peak, std::fabs(v));
  }
  for (double v : values_)
    require(v >= -1e-12 * peak, Err::BadArgument, "profile: negative values");
  require(values_.front() <= opt_.tail_tol && values_.back() <= opt_.tail_tol, Err::OutOfDomain,
          "profile: endpoint values above the tail tolerance; enlarge the grid");
  mass_ = trapz(grid_, values_);
  second_moment_ = trapz_weighted(grid_, values_, [](double v) { return v * v; });
}

double VelocityProfile::value(double v) const {
  if (rule_) return rule_(v);
  return interp6(grid_, values_, v);
}

double VelocityProfile::derivative(double v) const {
  if (rule_prime_) return rule_prime_(v);
  double h = grid_.dv();
  return (interp6(grid_, values_, v + h) - interp6(grid_, values_, v - h)) / (2.0 * h);
}

std::vector<double> VelocityProfile::derivative_values() const {
  if (rule_prime_) {
    std::vector<double> d(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) d[i] = rule_prime_(grid_.node(i));
    return d;
  }
  return derivative4(grid_, values_);
}

VelocityProfile normalize(const VelocityProfile& p) {
  require(p.mass() > p.options().tail_tol, Err::ZeroMass, "normalize: profile mass is zero");
  double s = 1.0 / p.mass();
  std::vector<double> v = p.values();
  for (auto& x : v) x *= s;
  VelocityProfile out(p.grid(), std::move(v), p.options());
  if (p.has_rule()) {
    auto f = p.rule();
    auto df = p.rule_prime();
    out.set_rules([f, s](double x) { return s * f(x); }, [df, s](double x) { return s * df(x); });
  }
  if (p.has_energy_rule()) {
    auto g = p.energy_rule();
    out.set_energy_rule([g, s](double w) { return s * g(w); });
  }
  return out;
}

VelocityProfile mollify(const VelocityProfile& p, double delta1) {
  const auto& g = p.grid();
  require(delta1 > 0, Err::BadArgument, "mollify: delta1 must be positive");
  require(delta1 >= 2.0 * g.dv(), Err::UnresolvableKernel, "mollify: kernel narrower than two cells");

  // standard mollifier C exp(1/(x^2-1)) on |x|<1, sampled and renormalized so
  // the discrete kernel has unit mass
  auto m = static_cast<long>(std::floor(delta1 / g.dv()));
  std::vector<double> kernel(2 * m + 1);
  double ksum = 0;
  for (long j = -m; j <= m; ++j) {
    double x = static_cast<double>(j) * g.dv() / delta1;
    double k = std::fabs(x) < 1.0 ? std::exp(1.0 / (x * x - 1.0)) : 0.0;
    kernel[static_cast<std::size_t>(j + m)] = k;
    ksum += k;
  }
  for (auto& k : kernel) k /= ksum;

  const auto n = static_cast<long>(g.size());
  std::vector<double> out(g.size(), 0.0);
  for (long i = 0; i < n; ++i) {
    double s = 0;
    for (long j = -m; j <= m; ++j) {
      long idx = i - j;
      if (idx < 0 || idx >= n) continue; // zero extension past the tails
      s += kernel[static_cast<std::size_t>(j + m)] * p.values()[static_cast<std::size_t>(idx)];
    }
    out[static_cast<std::size_t>(i)] = s;
  }
  return VelocityProfile(g, std::move(out), p.options());
}

VelocityProfile symmetrize_near(const VelocityProfile& p, double c, double delta2) {
  const auto& g = p.grid();
  require(delta2 > 0, Err::BadArgument, "symmetrize_near: delta2 must be positive");
  const std::size_t ic = g.nearest(c);
  const double cs = g.node(ic); // snapped center
  require(cs - 2.0 * delta2 >= g.v_min() && cs + 2.0 * delta2 <= g.v_max(), Err::OutOfDomain,
          "symmetrize_near: window leaves the grid");

  const auto n = static_cast<long>(g.size());
  std::vector<double> out = p.values();
  for (long i = 0; i < n; ++i) {
    double w = cutoff((g.node(static_cast<std::size_t>(i)) - cs) / delta2);
    if (w == 0.0) continue;
    long j = 2 * static_cast<long>(ic) - i; // exact lattice reflection
    double fr = (j >= 0 && j < n) ? p.values()[static_cast<std::size_t>(j)] : 0.0;
    out[static_cast<std::size_t>(i)] -= 0.5 * (p.values()[static_cast<std::size_t>(i)] - fr) * w;
  }
  VelocityProfile res(g, std::move(out), p.options());
  if (p.has_rule()) {
    auto f = p.rule();
    auto df = p.rule_prime();
    double d2 = delta2;
    res.set_rules(
        [f, cs, d2](double v) {
          return f(v) - 0.5 * (f(v) - f(2.0 * cs - v)) * cutoff((v - cs) / d2);
        },
        [f, df, cs, d2](double v) {
          double w = cutoff((v - cs) / d2), wp = cutoff_prime((v - cs) / d2) / d2;
          return df(v) - 0.5 * ((df(v) + df(2.0 * cs - v)) * w + (f(v) - f(2.0 * cs - v)) * wp);
        });
  }
  return res;
}

VelocityProfile modified_family(const VelocityProfile& p, const BumpFamily& F, double gamma,
                                double delta) {
  require(gamma >= 0 && delta > 0, Err::BadArgument, "modified_family: need gamma>=0, delta>0");
  if (gamma == 0.0) return p;
  const auto& g = p.grid();
  const double gd = gamma * delta;
  require(gd >= 2.0 * g.dv(), Err::UnresolvedBump, "modified_family: bump narrower than two cells");

  const double norm = 1.0 / (1.0 + F.c0() * gamma * gamma);
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = norm * (p.values()[i] + (gamma / delta) * F.value(g.node(i) / gd));
  VelocityProfile res(g, std::move(out), p.options());
  if (p.has_rule()) {
    auto f = p.rule();
    auto df = p.rule_prime();
    double a = gamma / delta;
    res.set_rules([f, F, a, gd, norm](double v) { return norm * (f(v) + a * F.value(v / gd)); },
                  [df, F, a, gd, norm](double v) {
                    return norm * (df(v) + a / gd * F.derivative(v / gd));
                  });
  }
  if (p.has_energy_rule()) {
    auto ge = p.energy_rule();
    double a = gamma / delta, gd2 = gd * gd;
    res.set_energy_rule(
        [ge, F, a, gd2, norm](double w) { return norm * (ge(w) + a * F.energy_value(w / gd2)); });
  }
  return res;
}

VelocityProfile rescale_profile(const VelocityProfile& p, double center, double delta) {
  require(delta > 0, Err::BadArgument, "rescale_profile: delta must be positive");
  const auto& g = p.grid();
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double u = center + (g.node(i) - center) / delta;
    out[i] = g.contains(u) ? p.value(u) / delta : 0.0;
  }
  require(out.front() <= p.options().tail_tol && out.back() <= p.options().tail_tol, Err::OutOfDomain,
          "rescale_profile: support escapes the grid");
  VelocityProfile res(g, std::move(out), p.options());
  if (p.has_rule()) {
    auto f = p.rule();
    auto df = p.rule_prime();
    res.set_rules([f, center, delta](double v) { return f(center + (v - center) / delta) / delta; },
                  [df, center, delta](double v) {
                    return df(center + (v - center) / delta) / (delta * delta);
                  });
  }
  if (p.has_energy_rule() && center == 0.0) {
    auto ge = p.energy_rule();
    res.set_energy_rule([ge, delta](double w) { return ge(w / (delta * delta)) / delta; });
  }
  return res;
}

std::vector<Extremum> find_extrema(const VelocityProfile& p, double degeneracy_tol) {
  const auto& g = p.grid();
  const auto& f = p.values();
  const std::size_t n = g.size();
  require(n >= 3, Err::BadArgument, "find_extrema: need at least 3 nodes");

  double peak = *std::max_element(f.begin(), f.end());
  const double floor = 1e-13 * std::max(peak, 1e-300);

  // Sign changes of the discrete derivative, paired across runs of
  // below-noise differences so flat tails and node-straddling peaks do not
  // fire twice.
  auto sgn = [floor](double d) { return d > floor ? 1 : (d < -floor ? -1 : 0); };
  std::vector<Extremum> out;
  long prev_sign = 0;
  std::size_t prev_idx = 0;
  for (std::size_t d = 0; d + 1 < n; ++d) {
    int s = sgn(f[d + 1] - f[d]);
    if (s == 0) continue;
    if (prev_sign != 0 && s != prev_sign) {
      // derivative flips between difference d_prev and difference d
      std::size_t i = (prev_idx + 1 + d + 1) / 2; // center node of the bracket
      i = std::clamp<std::size_t>(i, 1, n - 2);
      double a = 0.5 * (f[i + 1] - 2.0 * f[i] + f[i - 1]);
      double b = 0.5 * (f[i + 1] - f[i - 1]);
      double t = a != 0.0 ? std::clamp(-b / (2.0 * a), -1.0, 1.0) : 0.0;
      Extremum e;
      e.v = g.node(i) + t * g.dv();
      e.f_second = 2.0 * a / (g.dv() * g.dv());
      e.is_max = prev_sign > 0;
      out.push_back(e);
    }
    prev_sign = s;
    prev_idx = d;
  }
  double cmax = 0;
  for (const auto& e : out) cmax = std::max(cmax, std::fabs(e.f_second));
  for (auto& e : out) e.degenerate = std::fabs(e.f_second) < degeneracy_tol * cmax;
  return out;
}

VelocityProfile named_profile(const std::string& name, double param, const VelocityGrid& grid,
                              ProfileOptions opt) {
  if (name == "maxwellian") {
    auto f = [](double v) { return std::exp(-0.5 * v * v) / kSqrt2Pi; };
    VelocityProfile p(
        grid, f, [](double v) { return -v * std::exp(-0.5 * v * v) / kSqrt2Pi; }, opt);
    p.set_energy_rule([](double w) { return std::exp(-0.5 * w) / kSqrt2Pi; });
    return p;
  }
  if (name == "double_gaussian") {
    double v0 = param;
    auto f = [v0](double v) {
      return (std::exp(-0.5 * (v - v0) * (v - v0)) + std::exp(-0.5 * (v + v0) * (v + v0))) /
             (2.0 * kSqrt2Pi);
    };
    auto df = [v0](double v) {
      return (-(v - v0) * std::exp(-0.5 * (v - v0) * (v - v0)) -
              (v + v0) * std::exp(-0.5 * (v + v0) * (v + v0))) /
             (2.0 * kSqrt2Pi);
    };
    VelocityProfile p(grid, f, df, opt);
    p.set_energy_rule([v0, f](double w) {
      if (w >= 0) return f(std::sqrt(w));
      double wc = std::max(w, -4.0); // keep the continuation bounded
      return std::exp(-0.5 * (wc + v0 * v0)) * std::cos(v0 * std::sqrt(-wc)) / kSqrt2Pi;
    });
    return p;
  }
  if (name == "lorentzian") {
    auto f = [](double v) { return 1.0 / (M_PI * (1.0 + v * v)); };
    VelocityProfile p(
        grid, f, [](double v) { return -2.0 * v / (M_PI * (1.0 + v * v) * (1.0 + v * v)); }, opt);
    p.set_energy_rule([](double w) { return 1.0 / (M_PI * (1.0 + w)); });
    return p;
  }
  if (name == "gaussian") {
    double sigma = param > 0 ? param : 1.0;
    auto f = [sigma](double v) { return std::exp(-0.5 * v * v / (sigma * sigma)); };
    return VelocityProfile(
        grid, f, [sigma, f](double v) { return -v / (sigma * sigma) * f(v); }, opt);
  }
  if (name == "hat") {
    double w = param > 0 ? param : 1.0;
    auto f = [w](double v) { return std::max(0.0, 1.0 - std::fabs(v) / w); };
    auto df = [w](double v) {
      if (std::fabs(v) >= w || v == 0.0) return 0.0;
      return v > 0 ? -1.0 / w : 1.0 / w;
    };
    return VelocityProfile(grid, f, df, opt);
  }
  if (name == "weizner") {
    double alpha = param;
    const double scale = 4.0 / std::sqrt(M_PI); // unit mass on the half line
    auto f = [alpha, scale](double v) {
      double u = v - alpha;
      return u >= 0 ? scale * u * u * std::exp(-u * u) : 0.0;
    };
    auto df = [alpha, scale](double v) {
      double u = v - alpha;
      return u >= 0 ? scale * (2.0 * u - 2.0 * u * u * u) * std::exp(-u * u) : 0.0;
    };
    return VelocityProfile(grid, f, df, opt);
  }
  fail(Err::BadArgument, "unknown profile name: " + name);
}

VelocityGrid default_grid(const std::string& name, double param, std::size_t n_v) {
  if (name == "double_gaussian") {
    double half = param + 9.0;
    return VelocityGrid(-half, half, n_v);
  }
  if (name == "lorentzian") return VelocityGrid(-64.0, 64.0, std::max<std::size_t>(n_v, 8192));
  if (name == "weizner") return VelocityGrid(param - 8.0, param + 8.0, n_v | 1); // node at the kink
  if (name == "gaussian") {
    double half = 8.0 * std::max(param, 1.0);
    return VelocityGrid(-half, half, n_v);
  }
  return VelocityGrid(-8.0, 8.0, n_v);
}

ProfileOptions default_options(const std::string& name) {
  ProfileOptions opt;
  if (name == "lorentzian") opt.tail_tol = 1e-3; // algebraic tails
  return opt;
}

void save_profile_csv(const VelocityProfile& p, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), Err::Io, "cannot open " + path);
  out << "v,f\n";
  char buf[64];
  for (std::size_t i = 0; i < p.grid().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.grid().node(i), p.values()[i]);
    out << buf;
  }
}

VelocityProfile load_profile_csv(const std::string& path, ProfileOptions opt) {
  std::ifstream in(path);
  require(in.good(), Err::Io, "cannot open " + path);
  std::string line;
  std::getline(in, line); // header
  std::vector<double> vs, fs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double v, f;
    char comma;
    ss >> v >> comma >> f;
    require(!ss.fail(), Err::Io, "bad csv row in " + path);
    vs.push_back(v);
    fs.push_back(f);
  }
  require(vs.size() >= 16, Err::Io, "profile csv too short: " + path);
  VelocityGrid g(vs.front(), vs.back(), vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i)
    require(std::fabs(vs[i] - g.node(i)) < 1e-9 * g.dv() + 1e-12, Err::Io,
            "profile csv nodes are not uniform: " + path);
  return VelocityProfile(g, std::move(fs), opt);
}

} // namespace vpk

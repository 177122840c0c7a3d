#include "ppm/parameters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ppm/errors.hpp"
#include "ppm/fluctuations.hpp"

namespace ppm {

namespace {

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

void throw_if_any(const std::vector<std::string>& v, const char* what) {
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid " << what << ":";
  for (const auto& s : v) os << " " << s << ";";
  throw ParameterError(os.str());
}

// Channel coefficients derived from the rates may be exactly zero in exact
// arithmetic but land a few ulps below it.
constexpr double kRoundoff = 1e-12;

}  // namespace

std::vector<std::string> violations(const MicroParams& m) {
  std::vector<std::string> out;
  for (auto [name, v] : {std::pair{"p", m.p}, {"q", m.q}, {"a", m.a}, {"b", m.b}, {"c", m.c}})
    if (!(v >= 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " must be finite and >= 0");
  if (!in_open_unit(m.nu)) out.emplace_back("nu must lie in (0,1)");
  if (!in_open_unit(m.lambda)) out.emplace_back("lambda must lie in (0,1)");
  if (m.N < 2) out.emplace_back("N must be >= 2");
  return out;
}

std::vector<std::string> violations(const MacroParams& p) {
  std::vector<std::string> out;
  for (auto [name, v] : {std::pair{"gamma_A", p.gamma_A},
                         {"gamma_B", p.gamma_B},
                         {"alpha_AA", p.alpha_AA},
                         {"alpha_AB", p.alpha_AB},
                         {"beta_AB", p.beta_AB}})
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " must be finite and > 0");
  if (!out.empty()) return out;
  const double scale = std::max({p.alpha_AA, p.alpha_AB, p.beta_AB});
  if (!(p.alpha_AA > p.gamma_A)) out.emplace_back("alpha_AA must exceed gamma_A (prey death rate)");
  if (p.alpha_AB - p.beta_AB - p.alpha_AA < -kRoundoff * scale)
    out.emplace_back("alpha_AB - beta_AB - alpha_AA must be >= 0 (annihilation rate)");
  if (!(p.beta_AB + p.alpha_AB - p.alpha_AA > 0.0))
    out.emplace_back("beta_AB + alpha_AB - alpha_AA must be > 0 (predation rate)");
  if (!(p.gamma_B / p.beta_AB < p.gamma_A / p.alpha_AA))
    out.emplace_back("gamma_B/beta_AB must be < gamma_A/alpha_AA (prey-only point must be unstable)");
  return out;
}

std::vector<std::string> violations(const CanonicalParams& c) {
  std::vector<std::string> out;
  if (!in_open_unit(c.chi)) out.emplace_back("chi must lie in (0,1)");
  if (!in_open_unit(c.epsilon)) out.emplace_back("epsilon must lie in (0,1)");
  if (!in_open_unit(c.eta)) out.emplace_back("eta must lie in (0,1)");
  if (!in_open_unit(c.xi)) out.emplace_back("xi must lie in (0,1)");
  if (!(c.tau0 > 0.0) || !std::isfinite(c.tau0)) out.emplace_back("tau0 must be finite and > 0");
  return out;
}

void validate(const MicroParams& m) { throw_if_any(violations(m), "micro parameters"); }
void validate(const MacroParams& p) { throw_if_any(violations(p), "macro parameters"); }
void validate(const CanonicalParams& c) { throw_if_any(violations(c), "canonical parameters"); }

MacroParams micro_to_macro(const MicroParams& m) {
  validate(m);
  const double binary = 2.0 * m.nu;
  const double unitary = 1.0 - m.nu;
  MacroParams out;
  out.gamma_A = binary * m.c - unitary * m.p;
  out.gamma_B = unitary * m.q;
  out.alpha_AA = binary * m.c;
  out.alpha_AB = binary * (m.lambda * m.a + (1.0 - m.lambda) * m.b + m.c);
  out.beta_AB = binary * ((1.0 - m.lambda) * m.b - m.lambda * m.a);
  validate(out);
  return out;
}

MacroParams canonical_to_macro(const CanonicalParams& c) {
  validate(c);
  const double k = 2.0 / c.tau0;
  const double odds_eta = (1.0 - c.eta) / c.eta;
  MacroParams out;
  out.alpha_AA = k / c.chi;
  out.alpha_AB = k / (c.eta * c.chi);
  out.beta_AB = (c.xi / c.chi) * odds_eta * k;
  out.gamma_A = (1.0 + (1.0 - c.chi) / c.chi * c.epsilon) * k;
  out.gamma_B = c.xi * odds_eta * k;
  return out;
}

CanonicalParams macro_to_canonical(const MacroParams& p) {
  validate(p);
  CanonicalParams c;
  c.chi = p.gamma_B / p.beta_AB;
  c.tau0 = 2.0 / (p.alpha_AA * c.chi);
  c.eta = p.alpha_AA / p.alpha_AB;
  const double k = 2.0 / c.tau0;
  c.xi = p.gamma_B * c.eta / ((1.0 - c.eta) * k);
  const double r_b = (p.gamma_A * p.beta_AB - p.gamma_B * p.alpha_AA) / (p.alpha_AB * p.beta_AB);
  c.epsilon = r_b / ((1.0 - c.chi) * c.eta);
  return c;
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::saddle: return "saddle";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
  }
  return "?";
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::oscillatory: return "oscillatory";
    case Regime::overdamped: return "overdamped";
    case Regime::critical: return "critical";
  }
  return "?";
}

Matrix2 mean_field_jacobian(double R_A, double R_B, const MacroParams& p) {
  Matrix2 j{};
  j[0][0] = p.gamma_A - 2.0 * p.alpha_AA * R_A - p.alpha_AB * R_B;
  j[0][1] = -p.alpha_AB * R_A;
  j[1][0] = p.beta_AB * R_B;
  j[1][1] = p.beta_AB * R_A - p.gamma_B;
  return j;
}

Eigenpair eigenvalues(const Matrix2& m) {
  const double half_tr = 0.5 * (m[0][0] + m[1][1]);
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const std::complex<double> disc = std::sqrt(std::complex<double>(half_tr * half_tr - det, 0.0));
  return {half_tr + disc, half_tr - disc};
}

Stability classify(const Eigenpair& ev, double tol) {
  int neg = 0, pos = 0;
  for (const auto& e : ev) {
    if (e.real() < -tol) ++neg;
    else if (e.real() > tol) ++pos;
  }
  if (neg == 2) return Stability::stable;
  if (pos == 2) return Stability::unstable;
  if (pos == 1 && neg == 1) return Stability::saddle;
  return pos > 0 ? Stability::unstable : Stability::marginal;
}

FixedPoints fixed_points(const MacroParams& p) {
  validate(p);
  auto make = [&](double ra, double rb) {
    FixedPoint fp;
    fp.R_A = ra;
    fp.R_B = rb;
    fp.eigenvalues = eigenvalues(mean_field_jacobian(ra, rb, p));
    fp.stability = classify(fp.eigenvalues);
    return fp;
  };
  FixedPoints out;
  out.M_over_N = p.gamma_A / p.alpha_AA;
  out.trivial = make(0.0, 0.0);
  out.extinction = make(out.M_over_N, 0.0);
  out.coexistence = make(p.gamma_B / p.beta_AB,
                         (p.gamma_A * p.beta_AB - p.gamma_B * p.alpha_AA) / (p.alpha_AB * p.beta_AB));
  return out;
}

FluctConstants fluct_constants(const MacroParams& p) {
  const FixedPoints fps = fixed_points(p);
  const double ra = fps.coexistence.R_A;
  const double rb = fps.coexistence.R_B;

  FluctConstants fc;
  fc.R_A = ra;
  fc.R_B = rb;
  fc.mu_xx = p.alpha_AA * ra;
  fc.mu_xy = p.alpha_AB * ra;
  fc.mu_yx = p.beta_AB * rb;
  fc.sigma_x = std::sqrt(2.0 * p.alpha_AA * ra * (1.0 - ra - rb));
  fc.sigma_y = std::sqrt(ra * rb * (p.beta_AB + p.alpha_AB - p.alpha_AA));
  fc.rho = p.beta_AB * ra * rb / (fc.sigma_x * fc.sigma_y);
  fc.tau0 = 2.0 / fc.mu_xx;

  const double radicand = p.alpha_AB * p.beta_AB * ra * rb - 0.25 * fc.mu_xx * fc.mu_xx;
  if (radicand > 0.0) {
    fc.regime = Regime::oscillatory;
    fc.omega0 = std::sqrt(radicand);
    fc.t0 = fc.tau0;
  } else if (radicand < 0.0) {
    fc.regime = Regime::overdamped;
    fc.T0 = 1.0 / std::sqrt(-radicand);
    fc.t0 = 1.0 / (1.0 / fc.tau0 - 1.0 / fc.T0);
  } else {
    fc.regime = Regime::critical;
    fc.T0 = std::numeric_limits<double>::infinity();
    fc.t0 = fc.tau0;
  }
  return fc;
}

Magnification magnification(const CanonicalParams& c) {
  validate(c);
  const double chi = c.chi, eps = c.epsilon, eta = c.eta, xi = c.xi;
  const double noise = 0.5 * (1.0 + xi) / xi;
  Magnification m;
  m.omega_xx = (1.0 - eta * eps) * (1.0 - chi) / (chi * chi) + noise / (chi * eta);
  m.omega_yy = (((1.0 - chi) / chi * (1.0 - eta * eps) - 1.0) * eta * xi + 0.5 * (1.0 + xi)) * (1.0 - eta) /
                   ((1.0 - chi) * eta * eta * eps) +
               noise * chi / ((1.0 - chi) * (1.0 - chi) * eta * eps * eps);
  m.omega_xy = -noise / ((1.0 - chi) * eta * eps);
  m.omega_zz = m.omega_xx + m.omega_yy - 2.0 * m.omega_xy;
  return m;
}

double MagnificationResiduals::max() const noexcept { return std::max({xx, yy, xy}); }

MagnificationResiduals magnification_consistency(const CanonicalParams& c) {
  const Magnification m = magnification(c);
  const FluctConstants fc = fluct_constants(canonical_to_macro(c));
  const StationaryCovariances cov = stationary_covariances(fc);
  auto rel = [](double closed, double via_cov) { return std::abs(closed - via_cov) / std::abs(closed); };
  MagnificationResiduals r;
  r.xx = rel(m.omega_xx, cov.C_xx0 / (fc.R_A * fc.R_A));
  r.yy = rel(m.omega_yy, cov.C_yy0 / (fc.R_B * fc.R_B));
  r.xy = rel(m.omega_xy, cov.C_xy0 / (fc.R_A * fc.R_B));
  return r;
}

bool canonical_overdamped(const CanonicalParams& c) {
  return c.xi < c.chi * c.eta / (4.0 * (1.0 - c.chi) * (1.0 - c.eta) * c.epsilon);
}

}  // namespace ppm

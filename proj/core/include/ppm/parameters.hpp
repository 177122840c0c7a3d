#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace ppm {

/// Microscopic interaction rates of the three-state agent model.
///
/// p, q are the spontaneous A -> E and B -> E decay rates; a, b, c drive the
/// binary channels AB -> EE, AB -> BB and AE -> AA. nu is the probability of
/// picking a binary rather than unitary interaction and lambda the fraction of
/// AB encounters that annihilate instead of predate.
struct MicroParams {
  double p = 0.0;
  double q = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double nu = 0.5;
  double lambda = 0.5;
  int N = 1000;
};

/// The five size-independent rate constants (1/time) that fully determine
/// both the kinetics and every mean-field/fluctuation quantity.
struct MacroParams {
  double gamma_A = 0.0;
  double gamma_B = 0.0;
  double alpha_AA = 0.0;
  double alpha_AB = 0.0;
  double beta_AB = 0.0;

  /// Rate of the AB -> EE channel per unit of n*m/(N-1); zero when
  /// annihilation is switched off.
  double annihilation_coefficient() const noexcept { return 0.5 * (alpha_AB - beta_AB - alpha_AA); }
  /// Rate of the AB -> BB channel per unit of n*m/(N-1).
  double predation_coefficient() const noexcept { return 0.5 * (alpha_AB + beta_AB - alpha_AA); }
  /// Per-capita A -> E rate.
  double prey_death_rate() const noexcept { return alpha_AA - gamma_A; }

  bool operator==(const MacroParams&) const = default;
};

/// Free parameterisation in which every admissibility constraint holds by
/// construction: chi, epsilon, eta, xi in (0, 1) and a time scale tau0 > 0.
struct CanonicalParams {
  double chi = 0.2;
  double epsilon = 0.625;
  double eta = 0.4;
  double xi = 0.2;
  double tau0 = 10.0;

  bool operator==(const CanonicalParams&) const = default;
};

/// Human-readable list of every violated invariant; empty means valid.
std::vector<std::string> violations(const MicroParams& m);
std::vector<std::string> violations(const MacroParams& p);
std::vector<std::string> violations(const CanonicalParams& c);

/// Throw ParameterError listing the violations, if any.
void validate(const MicroParams& m);
void validate(const MacroParams& p);
void validate(const CanonicalParams& c);

/// Rates per unit time with the 1/N factor of the microscopic definitions
/// removed. Throws ParameterError if the result is not an admissible
/// MacroParams (e.g. beta_AB <= 0, which means predators die out).
MacroParams micro_to_macro(const MicroParams& m);

MacroParams canonical_to_macro(const CanonicalParams& c);

/// Inverse of canonical_to_macro for an admissible MacroParams. Boundary
/// cases (no annihilation channel) map to xi == 1.
CanonicalParams macro_to_canonical(const MacroParams& p);

enum class Stability { stable, saddle, unstable, marginal };

std::string to_string(Stability s);

using Matrix2 = std::array<std::array<double, 2>, 2>;
using Eigenpair = std::array<std::complex<double>, 2>;

/// Jacobian of the mean-field right-hand side at (R_A, R_B).
Matrix2 mean_field_jacobian(double R_A, double R_B, const MacroParams& p);

Eigenpair eigenvalues(const Matrix2& m);

/// Classify from eigenvalue real parts; |Re| <= tol counts as zero.
Stability classify(const Eigenpair& ev, double tol = 1e-10);

struct FixedPoint {
  double R_A = 0.0;
  double R_B = 0.0;
  Eigenpair eigenvalues{};
  Stability stability = Stability::marginal;
};

struct FixedPoints {
  FixedPoint trivial;
  FixedPoint extinction;   ///< prey-only point (M/N, 0)
  FixedPoint coexistence;  ///< (R_A°, R_B°)
  double M_over_N = 0.0;
};

FixedPoints fixed_points(const MacroParams& p);

/// How the linearised dynamics relax towards coexistence.
enum class Regime {
  oscillatory,  ///< complex eigenvalues, angular frequency omega0
  overdamped,   ///< two real decay rates, second time scale T0
  critical,     ///< omega0^2 == 0 exactly; reported as overdamped with T0 = inf
};

std::string to_string(Regime r);

/// Drift/diffusion constants of the linear-noise Fokker-Planck equation at
/// the coexistence point, plus the relaxation time scales.
struct FluctConstants {
  double mu_xx = 0.0;
  double mu_xy = 0.0;
  double mu_yx = 0.0;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double rho = 0.0;
  Regime regime = Regime::oscillatory;
  double omega0 = 0.0;  ///< meaningful only when regime == oscillatory
  double T0 = 0.0;      ///< meaningful only otherwise (+inf when critical)
  double tau0 = 0.0;
  double t0 = 0.0;
  double R_A = 0.0;  ///< coexistence densities the constants were taken at
  double R_B = 0.0;

  std::optional<double> omega0_if_oscillatory() const {
    return regime == Regime::oscillatory ? std::optional<double>(omega0) : std::nullopt;
  }
  std::optional<double> T0_if_overdamped() const {
    return regime == Regime::oscillatory ? std::nullopt : std::optional<double>(T0);
  }
  /// mu_xy * mu_yx, the determinant of the drift matrix.
  double coupling() const noexcept { return mu_xy * mu_yx; }
};

FluctConstants fluct_constants(const MacroParams& p);

struct Magnification {
  double omega_xx = 0.0;
  double omega_yy = 0.0;
  double omega_xy = 0.0;
  double omega_zz = 0.0;
};

Magnification magnification(const CanonicalParams& c);

/// Absolute relative residuals between the closed-form magnifying factors
/// and the ratios of stationary covariances to squared densities.
struct MagnificationResiduals {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
  double max() const noexcept;
};

MagnificationResiduals magnification_consistency(const CanonicalParams& c);

/// Closed-form boundary between regimes in canonical coordinates: true when
/// xi < chi*eta / (4 (1-chi)(1-eta) epsilon), i.e. no transient oscillation.
bool canonical_overdamped(const CanonicalParams& c);

}  // namespace ppm

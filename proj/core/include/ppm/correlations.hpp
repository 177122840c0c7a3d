#pragma once

#include <complex>
#include <string>

#include "ppm/parameters.hpp"

namespace ppm {

/// Which stationary correlation E[U(t) V(t + tau)] is meant.
enum class PairKind { xx, yy, xy };

std::string to_string(PairKind k);

/// Numerator coefficients of the spectral density,
/// P(omega) = (kappa1 + i kappa2 omega + kappa3 omega^2) / D(omega),
/// D(omega) = omega^2 mu_xx^2 + (omega^2 - mu_xy mu_yx)^2.
struct KappaCoeffs {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
};

KappaCoeffs kappa_coefficients(PairKind pair, const FluctConstants& fc);

std::complex<double> spectral_density(PairKind pair, const FluctConstants& fc, double omega);

/// Closed-form stationary correlation at lag tau. Dispatches on fc.regime:
/// cos/sin with frequency omega0, cosh/sinh with time scale T0, or their
/// common limit at the critical boundary. All carry the exp(-|tau|/tau0)
/// envelope.
double correlation(PairKind pair, const FluctConstants& fc, double tau);

struct QuadratureOptions {
  /// Frequency cutoff in units of max(1/tau0, sqrt(mu_xy mu_yx)); beyond it
  /// the integrand is replaced by its asymptotic expansion, integrated exactly.
  double cutoff_factor = 1e3;
  /// Per-panel Gauss-Kronrod relative tolerance.
  double panel_tol = 1e-13;
  /// Fail if the accumulated error estimate exceeds this fraction of the
  /// integral of |integrand|.
  double max_relative_error = 1e-9;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Inverse Fourier transform of the spectral density by adaptive quadrature:
///   C(tau) = (1/2pi) int P(omega) exp(-i omega tau) d omega.
/// Independent of correlation(); exists to check it.
/// Throws QuadratureError when the error estimate is too large.
QuadratureResult correlation_oracle(PairKind pair, const FluctConstants& fc, double tau,
                                    const QuadratureOptions& opt = {});

}  // namespace ppm

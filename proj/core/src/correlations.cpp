#include "ppm/correlations.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ppm/errors.hpp"
#include "ppm/special.hpp"

namespace ppm {

std::string to_string(PairKind k) {
  switch (k) {
    case PairKind::xx: return "xx";
    case PairKind::yy: return "yy";
    case PairKind::xy: return "xy";
  }
  return "?";
}

KappaCoeffs kappa_coefficients(PairKind pair, const FluctConstants& fc) {
  const double sx2 = fc.sigma_x * fc.sigma_x;
  const double sy2 = fc.sigma_y * fc.sigma_y;
  const double cross = fc.rho * fc.sigma_x * fc.sigma_y;
  switch (pair) {
    case PairKind::xx: return {fc.mu_xy * fc.mu_xy * sy2, 0.0, sx2};
    case PairKind::yy:
      return {fc.mu_yx * fc.mu_yx * sx2 + fc.mu_xx * fc.mu_xx * sy2 - 2.0 * fc.mu_xx * fc.mu_yx * cross, 0.0, sy2};
    case PairKind::xy:
      return {-fc.mu_xx * fc.mu_xy * sy2 + fc.mu_xy * fc.mu_yx * cross,
              fc.mu_yx * sx2 + fc.mu_xy * sy2 - fc.mu_xx * cross, -cross};
  }
  return {};
}

namespace {

double denominator(const FluctConstants& fc, double omega) {
  const double w2 = omega * omega;
  const double shifted = w2 - fc.coupling();
  return w2 * fc.mu_xx * fc.mu_xx + shifted * shifted;
}

}  // namespace

std::complex<double> spectral_density(PairKind pair, const FluctConstants& fc, double omega) {
  const KappaCoeffs k = kappa_coefficients(pair, fc);
  const double den = denominator(fc, omega);
  if (!(den > 0.0)) throw std::domain_error("spectral density denominator must be positive");
  return std::complex<double>(k.kappa1 + k.kappa3 * omega * omega, k.kappa2 * omega) / den;
}

double correlation(PairKind pair, const FluctConstants& fc, double tau) {
  const KappaCoeffs k = kappa_coefficients(pair, fc);
  const double p = fc.coupling();
  const double even = (k.kappa1 + k.kappa3 * p) / (fc.mu_xx * p);
  const double odd_abs = (k.kappa1 - k.kappa3 * p) / (2.0 * p);
  const double odd = k.kappa2 / fc.mu_xx;
  const double a = std::abs(tau);
  const double decay = a / fc.tau0;

  switch (fc.regime) {
    case Regime::oscillatory: {
      const double w = fc.omega0;
      const double bracket =
          even * std::cos(w * tau) + odd_abs * std::sin(w * a) / w + odd * std::sin(w * tau) / w;
      return 0.5 * bracket * std::exp(-decay);
    }
    case Regime::overdamped: {
      // Fold the envelope into the hyperbolic terms so large lags cannot
      // overflow cosh/sinh before the decay is applied.
      const double T = fc.T0;
      const double up = std::exp(a / T - decay);
      const double down = std::exp(-a / T - decay);
      const double ch = 0.5 * (up + down);
      const double sh_abs = 0.5 * (up - down);
      const double sh = tau < 0.0 ? -sh_abs : sh_abs;
      return 0.5 * (even * ch + odd_abs * T * sh_abs + odd * T * sh);
    }
    case Regime::critical:
      return 0.5 * (even + odd_abs * a + odd * tau) * std::exp(-decay);
  }
  return 0.0;
}

QuadratureResult correlation_oracle(PairKind pair, const FluctConstants& fc, double tau,
                                    const QuadratureOptions& opt) {
  const KappaCoeffs k = kappa_coefficients(pair, fc);
  const double p = fc.coupling();
  const double cutoff = opt.cutoff_factor * std::max(1.0 / fc.tau0, std::sqrt(p));

  // C(tau) = (1/pi) int_0^inf [(k1 + k3 w^2) cos(w tau) + k2 w sin(w tau)] / D(w) dw
  auto integrand = [&](double w) {
    return ((k.kappa1 + k.kappa3 * w * w) * std::cos(w * tau) + k.kappa2 * w * std::sin(w * tau)) /
           denominator(fc, w);
  };

  const double a = std::abs(tau);
  // Panels of about two periods keep each Gauss-Kronrod call non-oscillatory.
  double width = cutoff / 64.0;
  if (a > 0.0) width = std::min(width, 4.0 * std::numbers::pi / a);
  // Below the first panel, a geometric grid resolves the spectral peak of
  // width 1/t0 at the origin, which is very narrow when the coupling is weak.
  std::vector<double> edges{0.0};
  for (double r = 0.25 / fc.t0; r < width; r *= 2.0) edges.push_back(r);
  const double start = edges.back();
  const auto panels = static_cast<std::size_t>(std::ceil((cutoff - start) / width));
  width = (cutoff - start) / static_cast<double>(panels);
  for (std::size_t i = 1; i <= panels; ++i) edges.push_back(start + width * static_cast<double>(i));
  edges.back() = cutoff;

  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  // Boost leaves per-leaf error estimates unscaled by the half-width, so
  // each panel is mapped onto [0, 1], where that half-width is 1/2.
  auto on_unit = [&](std::size_t i) {
    return [&, lo = edges[i], h = edges[i + 1] - edges[i]](double u) { return h * integrand(lo + h * u); };
  };
  const std::size_t n = edges.size() - 1;
  // First pass: the L1 norm of the integrand sets the absolute accuracy goal.
  double l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    GK::integrate(on_unit(i), 0.0, 1.0, 0, 0.0, nullptr, &norm);
    l1 += norm;
  }
  // Boost's tolerance is relative to each panel's value, which cancels on
  // oscillatory panels. A constant offset per panel turns it into an
  // absolute goal; Gauss-Kronrod integrates the constant exactly.
  const double offset = l1 / static_cast<double>(n);
  double body = 0.0, err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto f = on_unit(i);
    double e = 0.0;
    body += GK::integrate([&](double u) { return f(u) + offset; }, 0.0, 1.0, 12, opt.panel_tol, &e) - offset;
    err += 0.5 * e;
  }

  // Beyond the cutoff, with D(w) = w^4 + s w^2 + p^2:
  //   (k1 + k3 w^2)/D = k3/w^2 + (k1 - k3 s)/w^4 + O(w^-6),  k2 w/D = k2/w^3 + O(w^-5).
  const double s = fc.mu_xx * fc.mu_xx - 2.0 * p;
  const double W = cutoff;
  const double x = a * W;
  const double j2 = a > 0.0 ? std::cos(x) / W - a * special::sine_integral_complement(x) : 1.0 / W;
  const double s3 = a > 0.0 ? std::sin(x) / (2.0 * W * W) + 0.5 * a * j2 : 0.0;
  const double c4 = std::cos(x) / (3.0 * W * W * W) - a / 3.0 * s3;
  const double sign = tau < 0.0 ? -1.0 : 1.0;
  const double tail = k.kappa3 * j2 + (k.kappa1 - k.kappa3 * s) * c4 + sign * k.kappa2 * s3;
  const double remainder = std::abs(k.kappa3 * (s * s - p * p) - k.kappa1 * s) / (5.0 * std::pow(W, 5)) +
                           std::abs(k.kappa2 * s) / (4.0 * std::pow(W, 4));

  QuadratureResult out;
  out.value = (body + tail) / std::numbers::pi;
  out.error_estimate = (err + remainder) / std::numbers::pi;
  const double scale = (l1 + std::abs(k.kappa3) / W) / std::numbers::pi;
  if (!(out.error_estimate <= opt.max_relative_error * scale))
    throw QuadratureError("correlation quadrature did not reach the requested accuracy", out.error_estimate);
  return out;
}

}  // namespace ppm

#pragma once

#include <optional>
#include <vector>

#include "ppm/parameters.hpp"
#include "ppm/rng.hpp"

namespace ppm {

/// Stationary second moments of the linear-noise fluctuations (X, Y).
struct StationaryCovariances {
  double C_xx0 = 0.0;
  double C_yy0 = 0.0;
  double C_xy0 = 0.0;

  /// Second moment of Y/R_B - X/R_A, the combination the pricing rules see.
  double relative_spread(double R_A, double R_B) const noexcept {
    return C_xx0 / (R_A * R_A) + C_yy0 / (R_B * R_B) - 2.0 * C_xy0 / (R_A * R_B);
  }
};

StationaryCovariances stationary_covariances(const FluctConstants& fc);

/// Sample path of (X, Y) on a uniform grid starting at t = 0.
struct FluctPath {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> X;
  std::vector<double> Y;
};

struct SdeOptions {
  double X0 = 0.0;
  double Y0 = 0.0;
  /// Simulated time discarded before recording; defaults to 20 tau0.
  std::optional<double> burn_in;
};

/// Euler-Maruyama on
///   dX = (-mu_xx X - mu_xy Y) dt + sigma_x dW1
///   dY = mu_yx X dt - rho sigma_y dW1 + sigma_y sqrt(1 - rho^2) dW2.
/// Requires dt <= tau0 / 50.
FluctPath simulate_sde(const FluctConstants& fc, double horizon, double dt, Rng& rng, const SdeOptions& opt = {});

struct PopulationPath {
  std::vector<double> n;
  std::vector<double> m;
};

/// n = N R_A° + sqrt(N) X, m = N R_B° + sqrt(N) Y, left real-valued.
PopulationPath reconstruct_populations(const FluctPath& path, const FixedPoints& fp, int N);

}  // namespace ppm

#include "ppm/fluctuations.hpp"

#include <cmath>

#include "ppm/errors.hpp"

namespace ppm {

StationaryCovariances stationary_covariances(const FluctConstants& fc) {
  const double sx2 = fc.sigma_x * fc.sigma_x;
  const double sy2 = fc.sigma_y * fc.sigma_y;
  const double cross = fc.rho * fc.sigma_x * fc.sigma_y;
  StationaryCovariances c;
  c.C_xx0 = (fc.mu_yx * sx2 + fc.mu_xy * sy2) / (2.0 * fc.mu_xx * fc.mu_yx);
  c.C_yy0 = (fc.mu_yx * fc.mu_yx * sx2 + (fc.mu_xx * fc.mu_xx + fc.mu_xy * fc.mu_yx) * sy2 -
             2.0 * fc.mu_xx * fc.mu_yx * cross) /
            (2.0 * fc.mu_xx * fc.mu_xy * fc.mu_yx);
  c.C_xy0 = -sy2 / (2.0 * fc.mu_yx);
  return c;
}

FluctPath simulate_sde(const FluctConstants& fc, double horizon, double dt, Rng& rng, const SdeOptions& opt) {
  if (!(dt > 0.0) || dt > fc.tau0 / 50.0) throw ParameterError("SDE step must satisfy 0 < dt <= tau0/50");
  if (!(horizon > 0.0)) throw ParameterError("horizon must be > 0");
  const double burn_in = opt.burn_in.value_or(20.0 * fc.tau0);
  if (burn_in < 0.0) throw ParameterError("burn-in must be >= 0");

  const double sq = std::sqrt(dt);
  const double a1 = fc.sigma_x * sq;
  const double b1 = -fc.rho * fc.sigma_y * sq;
  const double b2 = fc.sigma_y * std::sqrt(1.0 - fc.rho * fc.rho) * sq;
  double x = opt.X0, y = opt.Y0;
  auto advance = [&] {
    const double w1 = rng.normal();
    const double w2 = rng.normal();
    const double nx = x + (-fc.mu_xx * x - fc.mu_xy * y) * dt + a1 * w1;
    const double ny = y + fc.mu_yx * x * dt + b1 * w1 + b2 * w2;
    x = nx;
    y = ny;
  };

  const auto warm = static_cast<std::size_t>(std::llround(burn_in / dt));
  for (std::size_t k = 0; k < warm; ++k) advance();

  const auto steps = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
  FluctPath out;
  out.dt = dt;
  out.times.reserve(steps + 1);
  out.X.reserve(steps + 1);
  out.Y.reserve(steps + 1);
  for (std::size_t k = 0;; ++k) {
    out.times.push_back(static_cast<double>(k) * dt);
    out.X.push_back(x);
    out.Y.push_back(y);
    if (k == steps) break;
    advance();
  }
  return out;
}

PopulationPath reconstruct_populations(const FluctPath& path, const FixedPoints& fp, int N) {
  if (N < 2) throw ParameterError("N must be >= 2");
  const double root = std::sqrt(static_cast<double>(N));
  PopulationPath out;
  out.n.reserve(path.X.size());
  out.m.reserve(path.Y.size());
  for (std::size_t i = 0; i < path.X.size(); ++i) {
    out.n.push_back(N * fp.coexistence.R_A + root * path.X[i]);
    out.m.push_back(N * fp.coexistence.R_B + root * path.Y[i]);
  }
  return out;
}

}  // namespace ppm

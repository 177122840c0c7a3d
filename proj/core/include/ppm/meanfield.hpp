#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ppm/parameters.hpp"

namespace ppm {

/// Deterministic densities on an output grid.
struct DensityPath {
  std::vector<double> times;
  std::vector<double> R_A;
  std::vector<double> R_B;
};

using Densities = std::array<double, 2>;

/// Right-hand side of the first-order (Volterra) equations.
inline Densities rhs(double R_A, double R_B, const MacroParams& p) noexcept {
  return {(p.gamma_A - p.alpha_AA * R_A - p.alpha_AB * R_B) * R_A, (p.beta_AB * R_A - p.gamma_B) * R_B};
}

struct IntegrationOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-9;
  double output_step = 1.0;  ///< minutes between output samples
  std::size_t max_steps = 1'000'000;  ///< per output interval
};

/// Adaptive Dormand-Prince 5(4) integration with dense output onto a uniform
/// grid 0, h, 2h, ..., horizon (the horizon is always included).
/// Throws IntegrationError if step control fails or the path leaves the simplex.
DensityPath integrate(Densities init, const MacroParams& p, double horizon, const IntegrationOptions& opt = {});

}  // namespace ppm

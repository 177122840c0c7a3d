#include "ppm/meanfield.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

#include "ppm/errors.hpp"

namespace ppm {

namespace odeint = boost::numeric::odeint;

DensityPath integrate(Densities init, const MacroParams& p, double horizon, const IntegrationOptions& opt) {
  validate(p);
  if (!(init[0] >= 0.0 && init[1] >= 0.0 && init[0] + init[1] <= 1.0))
    throw ParameterError("initial densities must lie in the simplex R_A, R_B >= 0, R_A + R_B <= 1");
  if (!(horizon > 0.0) || !(opt.output_step > 0.0)) throw ParameterError("horizon and output step must be > 0");

  std::vector<double> grid;
  const auto steps = static_cast<std::size_t>(std::floor(horizon / opt.output_step + 1e-9));
  grid.reserve(steps + 2);
  for (std::size_t k = 0; k <= steps; ++k) grid.push_back(static_cast<double>(k) * opt.output_step);
  if (horizon - grid.back() > 1e-9 * opt.output_step) grid.push_back(horizon);

  DensityPath out;
  out.times.reserve(grid.size());
  out.R_A.reserve(grid.size());
  out.R_B.reserve(grid.size());

  auto system = [&p](const Densities& x, Densities& dxdt, double) { dxdt = rhs(x[0], x[1], p); };
  constexpr double kSlack = 1e-9;
  auto observer = [&](const Densities& x, double t) {
    if (x[0] < -kSlack || x[1] < -kSlack || x[0] + x[1] > 1.0 + kSlack) {
      std::ostringstream os;
      os << "mean-field path left the simplex at t = " << t;
      throw IntegrationError(os.str());
    }
    out.times.push_back(t);
    out.R_A.push_back(x[0]);
    out.R_B.push_back(x[1]);
  };

  Densities x = init;
  auto stepper = odeint::make_dense_output(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_dopri5<Densities>());
  try {
    odeint::integrate_times(stepper, system, x, grid.begin(), grid.end(), 0.01 * opt.output_step, observer,
                            odeint::max_step_checker(opt.max_steps));
  } catch (const odeint::no_progress_error& e) {
    throw IntegrationError(std::string("step control failed: ") + e.what());
  } catch (const odeint::step_adjustment_error& e) {
    throw IntegrationError(std::string("step control failed: ") + e.what());
  }
  return out;
}

}  // namespace ppm

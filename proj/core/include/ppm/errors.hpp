#pragma once

#include <stdexcept>
#include <string>

namespace ppm {

// Parameter set outside the model's admissible domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Total event rate is zero: the agent system cannot leave its current state.
class AbsorbingStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive ODE stepping gave up before reaching the requested horizon.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

// Liquidity pricing hit a state with no liquidity providers (n = 0).
class PricingError : public std::runtime_error {
 public:
  PricingError(const std::string& what, double event_time)
      : std::runtime_error(what), event_time_(event_time) {}
  double event_time() const noexcept { return event_time_; }

 private:
  double event_time_;
};

class InsufficientDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ppm

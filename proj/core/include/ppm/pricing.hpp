#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppm/kinetics.hpp"
#include "ppm/parameters.hpp"

namespace ppm {

enum class PriceModel { excess_demand, liquidity };

std::string to_string(PriceModel m);
std::optional<PriceModel> price_model_from_string(const std::string& s);

struct PricingConfig {
  double xi = 1e-3;            ///< sensitivity (1/min)
  double zeta = 1.0;           ///< liquidity threshold on m/n
  double r = 0.0;              ///< risk-free rate, used only for S(t) on export
  double R0 = 0.0;             ///< initial excess return
  double theta_at_zero = 1.0;  ///< Heaviside value at 0
  double grid_step = 1.0;      ///< output spacing (min)
};

/// Throws ParameterError unless xi > 0, zeta > 0, grid_step > 0 and
/// theta_at_zero lies in [0, 1].
void validate(const PricingConfig& cfg);

/// Liquidity threshold at the coexistence point, R_B°/R_A°.
double coexistence_zeta(const MacroParams& p);

/// Excess return R(t) = ln[S(t) e^{-rt}] on a uniform grid.
struct PriceSeries {
  PriceModel model = PriceModel::excess_demand;
  double step = 1.0;
  std::vector<double> times;
  std::vector<double> R;

  std::size_t size() const noexcept { return R.size(); }
  /// Undiscounted price S = exp(R + r t) at sample i.
  double price(std::size_t i, double r) const;
};

/// Sink for run_events(): integrates (xi/N)(m - n) exactly over each
/// inter-event interval and samples the result on the output grid.
class ExcessDemandPricer {
 public:
  ExcessDemandPricer(AgentState init, const PricingConfig& cfg, double horizon);
  void operator()(double t, Channel, const AgentState& s);
  PriceSeries finish();

  /// int_0^t (m - n) ds up to the last event seen.
  double integral() const noexcept { return integral_; }

 private:
  void emit_until(double t, bool inclusive);
  PricingConfig cfg_;
  double coef_;
  double integral_ = 0.0;
  double last_time_ = 0.0;
  int excess_;
  std::size_t points_;
  PriceSeries out_;
};

/// One liquidity-rule update, xi * gate * (m/n - zeta) * dt. Takes real
/// populations so reconstructed linear-noise states can be fed in directly.
inline double liquidity_increment(double n, double m, double zeta, double xi, double gate, double dt) {
  return xi * gate * (m / n - zeta) * dt;
}

/// Heaviside gate applied to the previous increment.
inline double liquidity_gate(double previous_increment, double theta_at_zero) {
  if (previous_increment > 0.0) return 1.0;
  if (previous_increment < 0.0) return 0.0;
  return theta_at_zero;
}

/// Sink for run_events(): at every state change, R advances by the liquidity
/// increment computed from the state that held over the elapsed interval and
/// gated by the sign of the previous increment. Throws PricingError if that
/// state has n = 0.
class LiquidityPricer {
 public:
  LiquidityPricer(AgentState init, const PricingConfig& cfg, double horizon);
  void operator()(double t, Channel, const AgentState& s);
  PriceSeries finish();

  double last_increment() const noexcept { return previous_; }
  std::uint64_t gated_updates() const noexcept { return gated_; }
  std::uint64_t updates() const noexcept { return updates_; }

 private:
  PricingConfig cfg_;
  double R_;
  double previous_ = 0.0;
  double last_time_ = 0.0;
  AgentState state_;
  std::size_t points_;
  std::uint64_t gated_ = 0;
  std::uint64_t updates_ = 0;
  PriceSeries out_;
};

PriceSeries excess_demand_price(const Trajectory& tr, const PricingConfig& cfg);
PriceSeries liquidity_price(const Trajectory& tr, const PricingConfig& cfg);

/// One sample per trading day at t = day_length * k, k = 1, 2, ...
/// The day length must be a multiple of the series step.
PriceSeries closing_prices(const PriceSeries& ps, double day_length = 480.0);

}  // namespace ppm

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ppm/parameters.hpp"
#include "ppm/pricing.hpp"

namespace ppm::harness {

struct Calendar {
  double day_minutes = 480.0;
  int year_days = 250;

  double year_minutes() const noexcept { return day_minutes * year_days; }
  bool operator==(const Calendar&) const = default;
};

struct ModelPricing {
  bool enabled = false;
  double xi = 1e-3;
  /// Liquidity threshold; empty means R_B°/R_A° of the configured model.
  std::optional<double> zeta;
  double theta_at_zero = 1.0;
  bool operator==(const ModelPricing&) const = default;
};

struct PricingSelection {
  ModelPricing excess_demand{true, 1e-3, std::nullopt, 1.0};
  ModelPricing liquidity{false, 0.05, std::nullopt, 1.0};
  double r = 0.0;
  double R0 = 0.0;
  double grid_step = 1.0;
  bool operator==(const PricingSelection&) const = default;
};

struct AnalyticsConfig {
  bool enabled = true;
  double burn_in = 100.0;
  std::vector<double> return_taus = {1.0, 10.0, 100.0, 480.0};
  std::vector<double> scaling_taus = {1,  2,  3,   4,   5,   7,   10,  15,  20,   30,   50,  70,
                                      100, 150, 200, 300, 500, 700, 1000, 1500, 2000, 2400};
  int histogram_bins = 201;
  double histogram_half_width = 10.0;
  int acf_max_lag = 60;
  int rv_window = 20;
  int rv_acf_max_lag = 120;
  int leverage_max_lag = 60;
  bool recurrence = true;
  double recurrence_min_mean = 1.0;
  /// Recurrence visits are recorded from this time on; empty means one day.
  std::optional<double> recurrence_burn_in;
  bool operator==(const AnalyticsConfig&) const = default;
};

struct InitialState {
  int n = 0;
  int m = 0;
  bool operator==(const InitialState&) const = default;
};

struct LnaConfig {
  bool enabled = false;
  double dt = 0.1;
  double horizon = 10000.0;
  bool operator==(const LnaConfig&) const = default;
};

/// How the exact simulation's path is kept on disk.
enum class TrajectoryStorage {
  none,  ///< stream straight into pricing/analytics
  full,  ///< every event
  grid,  ///< populations on a uniform grid only
};

struct ExperimentConfig {
  std::string name = "custom";
  /// Exactly one of the two parameterisations is set.
  std::optional<CanonicalParams> canonical;
  std::optional<MacroParams> macro;
  int N = 1000;
  double horizon = 120000.0;  ///< minutes
  std::uint64_t seed = 1;
  int replicas = 1;
  std::optional<InitialState> initial;  ///< default: rounded coexistence point
  TrajectoryStorage storage = TrajectoryStorage::none;
  double state_grid_step = 1.0;
  bool meanfield = false;
  double meanfield_step = 1.0;
  LnaConfig lna;
  PricingSelection pricing;
  AnalyticsConfig analytics;
  Calendar calendar;
  std::string output_dir;  ///< empty: resolved by the caller

  bool operator==(const ExperimentConfig&) const = default;

  MacroParams macro_params() const;
  AgentState initial_state() const;
  /// PricingConfig with zeta resolved against the model.
  PricingConfig pricing_config(PriceModel model) const;
};

/// Throws ParameterError with every problem found.
void validate(const ExperimentConfig& cfg);

/// Structured text (JSON) form; parse_config(to_json_text(c)) == c.
std::string to_json_text(const ExperimentConfig& cfg, int indent = 2);
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
/// Throws std::out_of_range for an unknown name.
ExperimentConfig preset(const std::string& name);

std::string to_string(TrajectoryStorage s);

}  // namespace ppm::harness

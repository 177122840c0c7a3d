#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ppm/kinetics.hpp"
#include "ppm/pricing.hpp"

namespace ppm {

/// Overlapping fixed-horizon returns R(t + tau) - R(t).
struct ReturnSamples {
  double tau = 0.0;
  std::vector<double> samples;
  bool standardized = false;
};

/// Returns on the grid t = burn_in, burn_in + grid_step, ... with t + tau
/// inside the series. tau and grid_step must be multiples of the series step.
/// Throws InsufficientDataError when no sample fits.
ReturnSamples fixed_time_returns(const PriceSeries& ps, double tau, double grid_step, double burn_in = 100.0);

/// Same on a raw uniformly sampled series, with lag and stride in samples.
std::vector<double> lagged_differences(std::span<const double> x, std::size_t lag, std::size_t stride = 1,
                                       std::size_t first = 0);

/// Divide by the sample standard deviation.
ReturnSamples standardize(ReturnSamples rs);

struct MomentSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  ///< bias-corrected (n - 1)
  std::optional<double> skewness;         ///< m3 / m2^1.5; empty when m2 == 0
  std::optional<double> excess_kurtosis;  ///< m4 / m2^2 - 3; empty when m2 == 0
};

/// Requires at least three samples.
MomentSummary moments(std::span<const double> x);

struct ScalingPoint {
  double tau;
  double std;
};

std::vector<ScalingPoint> volatility_scaling(const PriceSeries& ps, std::span<const double> taus,
                                             double grid_step = 1.0, double burn_in = 100.0);

/// Least-squares slope of log std against log tau over tau in [lo, hi].
double loglog_slope(std::span<const ScalingPoint> curve, double lo, double hi);

/// Realised n-session volatility on a daily closing series.
struct RealizedVolatility {
  int n = 20;
  double annualization = 0.0;
  std::vector<int> day;                ///< k, the session closing the window
  std::vector<double> volatility;      ///< annualised V_n(tau; k)
  std::vector<double> window_return;   ///< R(k tau) - R((k - n) tau)
};

/// `closing` holds R(k tau) for k = 1..D. For k = n+1..D the window uses the
/// n one-session returns ending at k; V is their population standard
/// deviation about the window mean, multiplied by `annualization`
/// (sqrt(250 / n) when not given).
RealizedVolatility realized_volatility(std::span<const double> closing, int n = 20,
                                       std::optional<double> annualization = std::nullopt);

/// Default annualisation for n sessions in a year of `year_days` sessions.
double default_annualization(int n, int year_days = 250);

/// Mean-removed sample autocorrelation at lags 0..max_lag, ACF(0) = 1.
/// Needs at least 2 * max_lag samples and nonzero variance.
std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag);

struct LaggedValue {
  int lag;
  double value;
};

/// corr(a_k, b_{k+lag}) for lag in [-max_lag, max_lag], using global means
/// and standard deviations and normalising by the full length.
std::vector<LaggedValue> cross_correlation(std::span<const double> a, std::span<const double> b, int max_lag);

/// Cross-correlation between n-session returns and realised volatilities.
std::vector<LaggedValue> leverage_correlation(const RealizedVolatility& rv, int max_lag);

struct RecurrenceEntry {
  int n;
  int m;
  std::uint64_t visits;
  double mean_recurrence;
};

/// Streaming visit recorder; sink for run_events(). A visit is an entry into
/// a state at time >= burn_in (the initial state counts when burn_in <= 0).
class RecurrenceTracker {
 public:
  RecurrenceTracker(AgentState init, double burn_in);
  void operator()(double t, Channel, const AgentState& s);
  /// States with at least two visits and mean recurrence >= min_mean,
  /// sorted by (n, m).
  std::vector<RecurrenceEntry> entries(double min_mean = 1.0) const;

 private:
  struct Visits {
    std::uint64_t count = 0;
    double first = 0.0;
    double last = 0.0;
  };
  void visit(double t, int n, int m);
  double burn_in_;
  std::unordered_map<std::uint64_t, Visits> table_;
};

std::vector<RecurrenceEntry> recurrence_map(const Trajectory& tr, double min_mean = 1.0, double burn_in = 480.0);

struct HistogramBin {
  double center;
  double density;
};

/// Equal-width bins over [-half_width, half_width]; density integrates to
/// the fraction of samples inside the range.
std::vector<HistogramBin> histogram(std::span<const double> x, double half_width = 10.0, int bins = 201);

}  // namespace ppm

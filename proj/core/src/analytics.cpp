#include "ppm/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ppm/errors.hpp"

namespace ppm {

namespace {

std::size_t steps_of(double span, double step, const char* what) {
  const double ratio = span / step;
  const auto k = static_cast<std::size_t>(std::llround(ratio));
  if (k == 0 || std::abs(ratio - static_cast<double>(k)) > 1e-9)
    throw ParameterError(std::string(what) + " must be a positive multiple of the series step");
  return k;
}

double mean_of(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

}  // namespace

std::vector<double> lagged_differences(std::span<const double> x, std::size_t lag, std::size_t stride,
                                       std::size_t first) {
  if (lag == 0 || stride == 0) throw ParameterError("lag and stride must be >= 1");
  std::vector<double> out;
  if (x.size() <= lag) return out;
  out.reserve((x.size() - lag) / stride + 1);
  for (std::size_t i = first; i + lag < x.size(); i += stride) out.push_back(x[i + lag] - x[i]);
  return out;
}

ReturnSamples fixed_time_returns(const PriceSeries& ps, double tau, double grid_step, double burn_in) {
  const std::size_t lag = steps_of(tau, ps.step, "tau");
  const std::size_t stride = steps_of(grid_step, ps.step, "grid step");
  if (lag % stride != 0) throw ParameterError("tau must be a multiple of the grid step");
  const auto first = static_cast<std::size_t>(std::ceil(std::max(0.0, burn_in) / ps.step - 1e-9));
  ReturnSamples rs;
  rs.tau = tau;
  rs.samples = lagged_differences(ps.R, lag, stride, first);
  if (rs.samples.empty()) throw InsufficientDataError("price series too short for the requested horizon");
  return rs;
}

ReturnSamples standardize(ReturnSamples rs) {
  const MomentSummary m = moments(rs.samples);
  if (!(m.std > 0.0)) throw InsufficientDataError("cannot standardize a zero-variance sample");
  for (double& v : rs.samples) v /= m.std;
  rs.standardized = true;
  return rs;
}

MomentSummary moments(std::span<const double> x) {
  if (x.size() < 3) throw InsufficientDataError("moments need at least three samples");
  MomentSummary out;
  out.count = x.size();
  out.mean = mean_of(x);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - out.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const auto n = static_cast<double>(x.size());
  out.std = std::sqrt(m2 / (n - 1.0));
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 > 0.0) {
    out.skewness = m3 / std::pow(m2, 1.5);
    out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return out;
}

std::vector<ScalingPoint> volatility_scaling(const PriceSeries& ps, std::span<const double> taus, double grid_step,
                                             double burn_in) {
  std::vector<ScalingPoint> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    const ReturnSamples rs = fixed_time_returns(ps, tau, grid_step, burn_in);
    if (rs.samples.size() < 4) throw InsufficientDataError("too few returns at the largest horizon");
    out.push_back({tau, moments(rs.samples).std});
  }
  return out;
}

double loglog_slope(std::span<const ScalingPoint> curve, double lo, double hi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int k = 0;
  for (const auto& pt : curve) {
    if (pt.tau < lo || pt.tau > hi || !(pt.std > 0.0)) continue;
    const double x = std::log(pt.tau), y = std::log(pt.std);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k < 2) throw InsufficientDataError("slope needs at least two horizons in range");
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

double default_annualization(int n, int year_days) {
  return std::sqrt(static_cast<double>(year_days) / static_cast<double>(n));
}

RealizedVolatility realized_volatility(std::span<const double> closing, int n, std::optional<double> annualization) {
  if (n < 1) throw ParameterError("window length must be >= 1");
  const auto D = static_cast<int>(closing.size());
  if (D < n + 1) throw InsufficientDataError("need at least n + 1 closing prices");
  RealizedVolatility rv;
  rv.n = n;
  rv.annualization = annualization.value_or(default_annualization(n));
  // closing[i] is R((i + 1) tau); the window ending at session k uses the
  // returns R((j + 1) tau) - R(j tau) for j = k - n .. k - 1.
  for (int k = n + 1; k <= D; ++k) {
    const double total = closing[k - 1] - closing[k - n - 1];
    const double mean = total / n;
    double ss = 0.0;
    for (int j = k - n; j <= k - 1; ++j) {
      const double d = (closing[j] - closing[j - 1]) - mean;
      ss += d * d;
    }
    rv.day.push_back(k);
    rv.volatility.push_back(rv.annualization * std::sqrt(ss / n));
    rv.window_return.push_back(total);
  }
  return rv;
}

std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag) {
  if (x.size() < 2 * max_lag || x.size() < 2) throw InsufficientDataError("series too short for the requested lags");
  const double mu = mean_of(x);
  std::vector<double> centred(x.size());
  std::transform(x.begin(), x.end(), centred.begin(), [mu](double v) { return v - mu; });
  const double var = std::inner_product(centred.begin(), centred.end(), centred.begin(), 0.0);
  if (!(var > 0.0)) throw InsufficientDataError("autocorrelation of a zero-variance series");
  std::vector<double> acf(max_lag + 1);
  for (std::size_t lag = 0; lag <= max_lag; ++lag)
    acf[lag] = std::inner_product(centred.begin() + lag, centred.end(), centred.begin(), 0.0) / var;
  return acf;
}

std::vector<LaggedValue> cross_correlation(std::span<const double> a, std::span<const double> b, int max_lag) {
  if (a.size() != b.size()) throw ParameterError("cross-correlation needs aligned series of equal length");
  const auto n = static_cast<int>(a.size());
  if (max_lag < 0 || n < 2 * max_lag + 2) throw InsufficientDataError("series too short for the requested lags");
  const double ma = mean_of(a), mb = mean_of(b);
  double va = 0.0, vb = 0.0;
  for (int i = 0; i < n; ++i) {
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(va > 0.0 && vb > 0.0)) throw InsufficientDataError("cross-correlation of a zero-variance series");
  const double norm = std::sqrt(va * vb);
  std::vector<LaggedValue> out;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    double s = 0.0;
    for (int i = std::max(0, -lag); i < n && i + lag < n; ++i) s += (a[i] - ma) * (b[i + lag] - mb);
    out.push_back({lag, s / norm});
  }
  return out;
}

std::vector<LaggedValue> leverage_correlation(const RealizedVolatility& rv, int max_lag) {
  return cross_correlation(rv.window_return, rv.volatility, max_lag);
}

RecurrenceTracker::RecurrenceTracker(AgentState init, double burn_in) : burn_in_(burn_in) {
  if (burn_in <= 0.0) visit(0.0, init.n, init.m);
}

void RecurrenceTracker::visit(double t, int n, int m) {
  const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(n)) << 32) |
                            static_cast<std::uint32_t>(m);
  Visits& v = table_[key];
  if (v.count == 0) v.first = t;
  v.last = t;
  ++v.count;
}

void RecurrenceTracker::operator()(double t, Channel, const AgentState& s) {
  if (t >= burn_in_) visit(t, s.n, s.m);
}

std::vector<RecurrenceEntry> RecurrenceTracker::entries(double min_mean) const {
  std::vector<RecurrenceEntry> out;
  for (const auto& [key, v] : table_) {
    if (v.count < 2) continue;
    const double mean = (v.last - v.first) / static_cast<double>(v.count - 1);
    if (mean < min_mean) continue;
    out.push_back({static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffULL), v.count, mean});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.n != b.n ? a.n < b.n : a.m < b.m; });
  return out;
}

std::vector<RecurrenceEntry> recurrence_map(const Trajectory& tr, double min_mean, double burn_in) {
  RecurrenceTracker tracker(tr.initial(), burn_in);
  tr.replay(tracker);
  return tracker.entries(min_mean);
}

std::vector<HistogramBin> histogram(std::span<const double> x, double half_width, int bins) {
  if (bins < 1 || !(half_width > 0.0)) throw ParameterError("histogram needs bins >= 1 and half_width > 0");
  if (x.empty()) throw InsufficientDataError("histogram of an empty sample");
  const double width = 2.0 * half_width / bins;
  std::vector<std::uint64_t> counts(bins, 0);
  for (double v : x) {
    if (v < -half_width || v > half_width) continue;
    auto k = static_cast<int>(std::floor((v + half_width) / width));
    counts[std::min(k, bins - 1)]++;
  }
  std::vector<HistogramBin> out(bins);
  for (int k = 0; k < bins; ++k)
    out[k] = {-half_width + (k + 0.5) * width, static_cast<double>(counts[k]) / (x.size() * width)};
  return out;
}

}  // namespace ppm

#include "ppm/pricing.hpp"

#include <cmath>
#include <sstream>

#include "ppm/errors.hpp"

namespace ppm {

std::string to_string(PriceModel m) { return m == PriceModel::excess_demand ? "excess_demand" : "liquidity"; }

std::optional<PriceModel> price_model_from_string(const std::string& s) {
  if (s == "excess_demand") return PriceModel::excess_demand;
  if (s == "liquidity") return PriceModel::liquidity;
  return std::nullopt;
}

void validate(const PricingConfig& cfg) {
  if (!(cfg.xi > 0.0) || !std::isfinite(cfg.xi)) throw ParameterError("pricing xi must be finite and > 0");
  if (!(cfg.zeta > 0.0) || !std::isfinite(cfg.zeta)) throw ParameterError("pricing zeta must be finite and > 0");
  if (!(cfg.grid_step > 0.0)) throw ParameterError("pricing grid step must be > 0");
  if (!(cfg.theta_at_zero >= 0.0 && cfg.theta_at_zero <= 1.0))
    throw ParameterError("theta_at_zero must lie in [0, 1]");
  if (!std::isfinite(cfg.r) || !std::isfinite(cfg.R0)) throw ParameterError("r and R0 must be finite");
}

double coexistence_zeta(const MacroParams& p) {
  const FixedPoints fps = fixed_points(p);
  return fps.coexistence.R_B / fps.coexistence.R_A;
}

double PriceSeries::price(std::size_t i, double r) const { return std::exp(R[i] + r * times[i]); }

namespace {

std::size_t grid_points(double horizon, double step) {
  return static_cast<std::size_t>(std::floor(horizon / step + 1e-9)) + 1;
}

void init_series(PriceSeries& ps, PriceModel model, double step, std::size_t points) {
  ps.model = model;
  ps.step = step;
  ps.times.reserve(points);
  ps.R.reserve(points);
}

}  // namespace

ExcessDemandPricer::ExcessDemandPricer(AgentState init, const PricingConfig& cfg, double horizon)
    : cfg_(cfg), coef_(cfg.xi / init.N), excess_(init.m - init.n), points_(grid_points(horizon, cfg.grid_step)) {
  validate(cfg);
  init_series(out_, PriceModel::excess_demand, cfg.grid_step, points_);
}

void ExcessDemandPricer::emit_until(double t, bool inclusive) {
  for (;;) {
    const std::size_t k = out_.R.size();
    if (k >= points_) return;
    const double g = static_cast<double>(k) * cfg_.grid_step;
    if (inclusive ? g > t : g >= t) return;
    out_.times.push_back(g);
    out_.R.push_back(cfg_.R0 + coef_ * (integral_ + excess_ * (g - last_time_)));
  }
}

void ExcessDemandPricer::operator()(double t, Channel, const AgentState& s) {
  emit_until(t, true);
  integral_ += excess_ * (t - last_time_);
  last_time_ = t;
  excess_ = s.m - s.n;
}

PriceSeries ExcessDemandPricer::finish() {
  emit_until(std::numeric_limits<double>::infinity(), true);
  return std::move(out_);
}

LiquidityPricer::LiquidityPricer(AgentState init, const PricingConfig& cfg, double horizon)
    : cfg_(cfg), R_(cfg.R0), state_(init), points_(grid_points(horizon, cfg.grid_step)) {
  validate(cfg);
  init_series(out_, PriceModel::liquidity, cfg.grid_step, points_);
}

void LiquidityPricer::operator()(double t, Channel, const AgentState& s) {
  while (out_.R.size() < points_ && static_cast<double>(out_.R.size()) * cfg_.grid_step < t) {
    out_.times.push_back(static_cast<double>(out_.R.size()) * cfg_.grid_step);
    out_.R.push_back(R_);
  }
  if (state_.n == 0) {
    std::ostringstream os;
    os << "liquidity pricing reached a state with no liquidity providers (n = 0) before t = " << t;
    throw PricingError(os.str(), t);
  }
  const double gate = liquidity_gate(previous_, cfg_.theta_at_zero);
  const double inc = liquidity_increment(state_.n, state_.m, cfg_.zeta, cfg_.xi, gate, t - last_time_);
  if (gate == 0.0) ++gated_;
  ++updates_;
  R_ += inc;
  previous_ = inc;
  last_time_ = t;
  state_ = s;
}

PriceSeries LiquidityPricer::finish() {
  while (out_.R.size() < points_) {
    out_.times.push_back(static_cast<double>(out_.R.size()) * cfg_.grid_step);
    out_.R.push_back(R_);
  }
  return std::move(out_);
}

PriceSeries excess_demand_price(const Trajectory& tr, const PricingConfig& cfg) {
  ExcessDemandPricer pricer(tr.initial(), cfg, tr.horizon());
  tr.replay(pricer);
  return pricer.finish();
}

PriceSeries liquidity_price(const Trajectory& tr, const PricingConfig& cfg) {
  LiquidityPricer pricer(tr.initial(), cfg, tr.horizon());
  tr.replay(pricer);
  return pricer.finish();
}

PriceSeries closing_prices(const PriceSeries& ps, double day_length) {
  if (!(day_length > 0.0)) throw ParameterError("day length must be > 0");
  const double ratio = day_length / ps.step;
  const auto stride = static_cast<std::size_t>(std::llround(ratio));
  if (stride == 0 || std::abs(ratio - static_cast<double>(stride)) > 1e-9)
    throw ParameterError("day length must be a whole multiple of the series step");
  if (ps.size() <= stride) throw InsufficientDataError("price series shorter than one trading day");
  PriceSeries out;
  out.model = ps.model;
  out.step = day_length;
  for (std::size_t i = stride; i < ps.size(); i += stride) {
    out.times.push_back(ps.times[i]);
    out.R.push_back(ps.R[i]);
  }
  return out;
}

}  // namespace ppm

#include "ppm/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ppm/errors.hpp"
#include "ppm/kinetics.hpp"

namespace ppm::harness {

using json = nlohmann::ordered_json;

std::string to_string(TrajectoryStorage s) {
  switch (s) {
    case TrajectoryStorage::none: return "none";
    case TrajectoryStorage::full: return "full";
    case TrajectoryStorage::grid: return "grid";
  }
  return "?";
}

MacroParams ExperimentConfig::macro_params() const {
  if (canonical && macro) throw ParameterError("give either canonical or macro parameters, not both");
  if (canonical) return canonical_to_macro(*canonical);
  if (macro) {
    validate(*macro);
    return *macro;
  }
  throw ParameterError("no model parameters given");
}

AgentState ExperimentConfig::initial_state() const {
  if (initial) return {initial->n, initial->m, N};
  return coexistence_state(macro_params(), N);
}

PricingConfig ExperimentConfig::pricing_config(PriceModel model) const {
  const ModelPricing& mp = model == PriceModel::excess_demand ? pricing.excess_demand : pricing.liquidity;
  PricingConfig out;
  out.xi = mp.xi;
  out.zeta = mp.zeta ? *mp.zeta : coexistence_zeta(macro_params());
  out.theta_at_zero = mp.theta_at_zero;
  out.r = pricing.r;
  out.R0 = pricing.R0;
  out.grid_step = pricing.grid_step;
  return out;
}

namespace {

bool multiple_of(double value, double step) {
  const double ratio = value / step;
  return ratio >= 1.0 - 1e-9 && std::abs(ratio - std::round(ratio)) < 1e-9;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) problems.push_back(msg);
  };
  if (cfg.canonical.has_value() == cfg.macro.has_value()) {
    problems.emplace_back("exactly one of model.canonical / model.macro must be given");
  } else {
    for (auto& v : cfg.canonical ? violations(*cfg.canonical) : violations(*cfg.macro)) problems.push_back(v);
  }
  check(cfg.N >= 2, "N must be >= 2");
  check(cfg.horizon > 0.0 && std::isfinite(cfg.horizon), "horizon must be finite and > 0");
  check(cfg.replicas >= 1, "replicas must be >= 1");
  if (cfg.initial) {
    const AgentState s{cfg.initial->n, cfg.initial->m, cfg.N};
    check(s.valid(), "initial state must satisfy 0 <= n, m and n + m <= N");
  }
  check(cfg.state_grid_step > 0.0, "trajectory grid step must be > 0");
  check(cfg.meanfield_step > 0.0, "mean-field step must be > 0");
  check(cfg.calendar.day_minutes > 0.0 && cfg.calendar.year_days > 0, "calendar constants must be > 0");
  check(cfg.pricing.grid_step > 0.0, "pricing grid step must be > 0");
  for (const ModelPricing* mp : {&cfg.pricing.excess_demand, &cfg.pricing.liquidity}) {
    check(mp->xi > 0.0, "pricing xi must be > 0");
    check(!mp->zeta || *mp->zeta > 0.0, "pricing zeta must be > 0");
    check(mp->theta_at_zero >= 0.0 && mp->theta_at_zero <= 1.0, "theta_at_zero must lie in [0, 1]");
  }
  if (cfg.pricing.grid_step > 0.0) {
    check(multiple_of(cfg.calendar.day_minutes, cfg.pricing.grid_step),
          "trading day must be a multiple of the pricing grid step");
    for (double tau : cfg.analytics.return_taus)
      check(multiple_of(tau, cfg.pricing.grid_step), "return horizons must be multiples of the pricing grid step");
    for (double tau : cfg.analytics.scaling_taus)
      check(multiple_of(tau, cfg.pricing.grid_step), "scaling horizons must be multiples of the pricing grid step");
  }
  const AnalyticsConfig& a = cfg.analytics;
  check(a.burn_in >= 0.0, "analytics burn-in must be >= 0");
  check(a.histogram_bins >= 1 && a.histogram_half_width > 0.0, "histogram needs bins >= 1 and half width > 0");
  check(a.acf_max_lag >= 1 && a.rv_acf_max_lag >= 1 && a.leverage_max_lag >= 0, "lags must be positive");
  check(a.rv_window >= 1, "realized-volatility window must be >= 1");
  check(a.recurrence_min_mean >= 0.0, "recurrence floor must be >= 0");
  if (cfg.lna.enabled) {
    check(cfg.lna.horizon > 0.0, "lna horizon must be > 0");
    if (problems.empty()) {
      const FluctConstants fc = fluct_constants(cfg.macro_params());
      check(cfg.lna.dt > 0.0 && cfg.lna.dt <= fc.tau0 / 50.0, "lna dt must satisfy 0 < dt <= tau0/50");
    }
  }
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid experiment configuration:";
    for (const auto& p : problems) os << "\n  - " << p;
    throw ParameterError(os.str());
  }
}

namespace {

json to_json(const ModelPricing& mp) {
  json j;
  j["enabled"] = mp.enabled;
  j["xi"] = mp.xi;
  j["zeta"] = mp.zeta ? json(*mp.zeta) : json(nullptr);
  j["theta_at_zero"] = mp.theta_at_zero;
  return j;
}

json to_json_object(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  json model;
  if (c.canonical)
    model["canonical"] = {{"chi", c.canonical->chi},
                          {"epsilon", c.canonical->epsilon},
                          {"eta", c.canonical->eta},
                          {"xi", c.canonical->xi},
                          {"tau0", c.canonical->tau0}};
  if (c.macro)
    model["macro"] = {{"gamma_A", c.macro->gamma_A},
                      {"gamma_B", c.macro->gamma_B},
                      {"alpha_AA", c.macro->alpha_AA},
                      {"alpha_AB", c.macro->alpha_AB},
                      {"beta_AB", c.macro->beta_AB}};
  j["model"] = model;
  j["N"] = c.N;
  j["horizon_min"] = c.horizon;
  j["seed"] = c.seed;
  j["replicas"] = c.replicas;
  j["initial"] = c.initial ? json{{"n", c.initial->n}, {"m", c.initial->m}} : json(nullptr);
  j["trajectory"] = {{"storage", to_string(c.storage)}, {"grid_step_min", c.state_grid_step}};
  j["meanfield"] = {{"enabled", c.meanfield}, {"step_min", c.meanfield_step}};
  j["lna"] = {{"enabled", c.lna.enabled}, {"dt_min", c.lna.dt}, {"horizon_min", c.lna.horizon}};
  j["pricing"] = {{"r", c.pricing.r},
                  {"R0", c.pricing.R0},
                  {"grid_step_min", c.pricing.grid_step},
                  {"excess_demand", to_json(c.pricing.excess_demand)},
                  {"liquidity", to_json(c.pricing.liquidity)}};
  const AnalyticsConfig& a = c.analytics;
  j["analytics"] = {{"enabled", a.enabled},
                    {"burn_in_min", a.burn_in},
                    {"return_taus_min", a.return_taus},
                    {"scaling_taus_min", a.scaling_taus},
                    {"histogram_bins", a.histogram_bins},
                    {"histogram_half_width", a.histogram_half_width},
                    {"acf_max_lag", a.acf_max_lag},
                    {"rv_window", a.rv_window},
                    {"rv_acf_max_lag", a.rv_acf_max_lag},
                    {"leverage_max_lag", a.leverage_max_lag},
                    {"recurrence", a.recurrence},
                    {"recurrence_min_mean_min", a.recurrence_min_mean},
                    {"recurrence_burn_in_min",
                     a.recurrence_burn_in ? json(*a.recurrence_burn_in) : json(nullptr)}};
  j["calendar"] = {{"day_min", c.calendar.day_minutes}, {"year_days", c.calendar.year_days}};
  j["output_dir"] = c.output_dir;
  return j;
}

// Reads keys from an object, remembering which were seen so that typos in a
// config file are reported instead of silently ignored.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ParameterError(where_ + " must be an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ParameterError("unknown key '" + it.key() + "' in " + where_);
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ParameterError(where_ + "." + key + ": " + e.what());
    }
  }
  template <class T>
  void get(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    T v{};
    get(key, v);
    out = v;
  }
  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  Reader sub(const char* key) {
    seen_.insert(key);
    return Reader(j_.at(key), where_ + "." + key);
  }
  void mark(const char* key) { seen_.insert(key); }
  const json& raw(const char* key) const { return j_.at(key); }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_model_pricing(Reader r, ModelPricing& mp) {
  r.get("enabled", mp.enabled);
  r.get("xi", mp.xi);
  r.get("zeta", mp.zeta);
  r.get("theta_at_zero", mp.theta_at_zero);
}

ExperimentConfig from_json_object(const json& j) {
  ExperimentConfig c;
  Reader r(j, "config");
  r.get("name", c.name);
  if (r.has("model")) {
    Reader m = r.sub("model");
    if (m.has("canonical")) {
      CanonicalParams cp;
      Reader k = m.sub("canonical");
      k.get("chi", cp.chi);
      k.get("epsilon", cp.epsilon);
      k.get("eta", cp.eta);
      k.get("xi", cp.xi);
      k.get("tau0", cp.tau0);
      c.canonical = cp;
    } else {
      m.mark("canonical");
    }
    if (m.has("macro")) {
      MacroParams mp;
      Reader k = m.sub("macro");
      k.get("gamma_A", mp.gamma_A);
      k.get("gamma_B", mp.gamma_B);
      k.get("alpha_AA", mp.alpha_AA);
      k.get("alpha_AB", mp.alpha_AB);
      k.get("beta_AB", mp.beta_AB);
      c.macro = mp;
    } else {
      m.mark("macro");
    }
  } else {
    r.mark("model");
  }
  r.get("N", c.N);
  r.get("horizon_min", c.horizon);
  r.get("seed", c.seed);
  r.get("replicas", c.replicas);
  if (r.has("initial")) {
    Reader k = r.sub("initial");
    InitialState s;
    k.get("n", s.n);
    k.get("m", s.m);
    c.initial = s;
  } else {
    r.mark("initial");
  }
  if (r.has("trajectory")) {
    Reader k = r.sub("trajectory");
    std::string storage = to_string(c.storage);
    k.get("storage", storage);
    if (storage == "none") c.storage = TrajectoryStorage::none;
    else if (storage == "full") c.storage = TrajectoryStorage::full;
    else if (storage == "grid") c.storage = TrajectoryStorage::grid;
    else throw ParameterError("trajectory.storage must be none, full or grid");
    k.get("grid_step_min", c.state_grid_step);
  }
  if (r.has("meanfield")) {
    Reader k = r.sub("meanfield");
    k.get("enabled", c.meanfield);
    k.get("step_min", c.meanfield_step);
  }
  if (r.has("lna")) {
    Reader k = r.sub("lna");
    k.get("enabled", c.lna.enabled);
    k.get("dt_min", c.lna.dt);
    k.get("horizon_min", c.lna.horizon);
  }
  if (r.has("pricing")) {
    Reader k = r.sub("pricing");
    k.get("r", c.pricing.r);
    k.get("R0", c.pricing.R0);
    k.get("grid_step_min", c.pricing.grid_step);
    if (k.has("excess_demand")) read_model_pricing(k.sub("excess_demand"), c.pricing.excess_demand);
    if (k.has("liquidity")) read_model_pricing(k.sub("liquidity"), c.pricing.liquidity);
  }
  if (r.has("analytics")) {
    Reader k = r.sub("analytics");
    AnalyticsConfig& a = c.analytics;
    k.get("enabled", a.enabled);
    k.get("burn_in_min", a.burn_in);
    k.get("return_taus_min", a.return_taus);
    k.get("scaling_taus_min", a.scaling_taus);
    k.get("histogram_bins", a.histogram_bins);
    k.get("histogram_half_width", a.histogram_half_width);
    k.get("acf_max_lag", a.acf_max_lag);
    k.get("rv_window", a.rv_window);
    k.get("rv_acf_max_lag", a.rv_acf_max_lag);
    k.get("leverage_max_lag", a.leverage_max_lag);
    k.get("recurrence", a.recurrence);
    k.get("recurrence_min_mean_min", a.recurrence_min_mean);
    k.get("recurrence_burn_in_min", a.recurrence_burn_in);
  }
  if (r.has("calendar")) {
    Reader k = r.sub("calendar");
    k.get("day_min", c.calendar.day_minutes);
    k.get("year_days", c.calendar.year_days);
  }
  r.get("output_dir", c.output_dir);
  return c;
}

}  // namespace

std::string to_json_text(const ExperimentConfig& cfg, int indent) { return to_json_object(cfg).dump(indent); }

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json_object(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

ExperimentConfig market_base(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.canonical = CanonicalParams{0.2, 0.643, 0.4, 0.2, 10.0};
  c.N = 1000;
  c.horizon = c.calendar.year_minutes();
  c.seed = 1;
  c.analytics.recurrence = false;
  return c;
}

std::map<std::string, ExperimentConfig> build_presets() {
  std::map<std::string, ExperimentConfig> out;

  // Population path out of equilibrium with the deterministic overlay.
  ExperimentConfig fig2 = market_base("fig2");
  fig2.horizon = 960.0;
  fig2.initial = InitialState{300, 100};
  fig2.storage = TrajectoryStorage::full;
  fig2.meanfield = true;
  fig2.pricing.excess_demand.enabled = false;
  fig2.analytics.enabled = false;
  out["fig2"] = fig2;

  for (const char* name : {"fig3", "fig4", "fig5", "fig6", "fig8"}) out[name] = market_base(name);

  ExperimentConfig fig7 = market_base("fig7");
  fig7.analytics.recurrence = true;
  out["fig7"] = fig7;

  ExperimentConfig fig9 = market_base("fig9");
  fig9.pricing.excess_demand.enabled = false;
  fig9.pricing.liquidity.enabled = true;
  out["fig9"] = fig9;

  ExperimentConfig fig10 = market_base("fig10");
  fig10.pricing.liquidity.enabled = true;
  out["fig10"] = fig10;

  // The magnification example: same shape as the market runs, epsilon = 0.625.
  ExperimentConfig mag = market_base("magnification");
  mag.canonical->epsilon = 0.625;
  mag.horizon = 10000.0;
  mag.lna.enabled = true;
  mag.pricing.excess_demand.enabled = false;
  mag.analytics.enabled = false;
  out["magnification"] = mag;

  // Below the oscillation boundary xi < chi eta / (4 (1-chi)(1-eta) eps).
  ExperimentConfig over = mag;
  over.name = "overdamped";
  over.canonical->xi = 0.05;
  out["overdamped"] = over;
  return out;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : build_presets()) out.push_back(k);
  return out;
}

ExperimentConfig preset(const std::string& name) {
  const auto all = build_presets();
  const auto it = all.find(name);
  if (it == all.end()) throw std::out_of_range("unknown preset '" + name + "'");
  return it->second;
}

}  // namespace ppm::harness

#include "ppm/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ppm/analytics.hpp"
#include "ppm/errors.hpp"
#include "ppm/fluctuations.hpp"
#include "ppm/kinetics.hpp"
#include "ppm/meanfield.hpp"
#include "ppm/pricing.hpp"
#include "ppm/rng.hpp"
#include "ppm/tabular.hpp"

#ifndef PPM_VERSION
#define PPM_VERSION "0.0.0"
#endif

namespace ppm::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using io::TableWriter;

std::string version() { return PPM_VERSION; }

namespace {

template <class F>
auto in_stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json eigen_json(const Eigenpair& ev) {
  return json::array({json::array({ev[0].real(), ev[0].imag()}), json::array({ev[1].real(), ev[1].imag()})});
}

json fixed_point_json(const FixedPoint& fp) {
  return {{"R_A", fp.R_A},
          {"R_B", fp.R_B},
          {"stability", to_string(fp.stability)},
          {"eigenvalues", eigen_json(fp.eigenvalues)}};
}

std::optional<Magnification> magnification_of(const ExperimentConfig& cfg) {
  try {
    return magnification(cfg.canonical ? *cfg.canonical : macro_to_canonical(*cfg.macro));
  } catch (const ParameterError&) {
    return std::nullopt;
  }
}

json describe_object(const ExperimentConfig& cfg) {
  const MacroParams mp = cfg.macro_params();
  const FixedPoints fps = fixed_points(mp);
  const FluctConstants fc = fluct_constants(mp);
  const StationaryCovariances cov = stationary_covariances(fc);
  const double N = cfg.N;

  json j;
  j["name"] = cfg.name;
  j["N"] = cfg.N;
  if (cfg.canonical)
    j["canonical"] = {{"chi", cfg.canonical->chi},
                      {"epsilon", cfg.canonical->epsilon},
                      {"eta", cfg.canonical->eta},
                      {"xi", cfg.canonical->xi},
                      {"tau0", cfg.canonical->tau0}};
  j["macro"] = {{"gamma_A", mp.gamma_A},
                {"gamma_B", mp.gamma_B},
                {"alpha_AA", mp.alpha_AA},
                {"alpha_AB", mp.alpha_AB},
                {"beta_AB", mp.beta_AB}};
  j["fixed_points"] = {{"trivial", fixed_point_json(fps.trivial)},
                       {"extinction", fixed_point_json(fps.extinction)},
                       {"coexistence", fixed_point_json(fps.coexistence)},
                       {"M_over_N", fps.M_over_N}};
  json fl = {{"mu_xx", fc.mu_xx}, {"mu_xy", fc.mu_xy}, {"mu_yx", fc.mu_yx}, {"sigma_x", fc.sigma_x},
             {"sigma_y", fc.sigma_y}, {"rho", fc.rho},     {"regime", to_string(fc.regime)}};
  if (fc.regime == Regime::oscillatory) {
    fl["omega0"] = fc.omega0;
    fl["period_min"] = 2.0 * std::numbers::pi / fc.omega0;
  } else {
    fl["T0"] = number(fc.T0);
  }
  fl["tau0"] = fc.tau0;
  fl["t0"] = fc.t0;
  j["fluctuations"] = fl;
  j["stationary_covariances"] = {{"C_xx0", cov.C_xx0},          {"C_yy0", cov.C_yy0},
                                 {"C_xy0", cov.C_xy0},          {"var_n", N * cov.C_xx0},
                                 {"var_m", N * cov.C_yy0},      {"cov_nm", N * cov.C_xy0},
                                 {"relative_spread", cov.relative_spread(fc.R_A, fc.R_B)}};
  if (const auto mag = magnification_of(cfg))
    j["magnification"] = {{"omega_xx", mag->omega_xx},
                          {"omega_yy", mag->omega_yy},
                          {"omega_xy", mag->omega_xy},
                          {"omega_zz", mag->omega_zz}};
  else
    j["magnification"] = nullptr;
  j["pricing"] = {{"zeta_coexistence", coexistence_zeta(mp)}};
  j["formulas"] = {
      {"M_over_N", "gamma_A / alpha_AA"},
      {"R_A", "gamma_B / beta_AB"},
      {"R_B", "(gamma_A beta_AB - gamma_B alpha_AA) / (alpha_AB beta_AB)"},
      {"mu_xx", "alpha_AA R_A"},
      {"mu_xy", "alpha_AB R_A"},
      {"mu_yx", "beta_AB R_B"},
      {"sigma_x", "sqrt(2 alpha_AA R_A (1 - R_A - R_B))"},
      {"sigma_y", "sqrt(R_A R_B (beta_AB + alpha_AB - alpha_AA))"},
      {"rho", "beta_AB R_A R_B / (sigma_x sigma_y)"},
      {"tau0", "2 / mu_xx"},
      {"omega0", "sqrt(mu_xy mu_yx - mu_xx^2 / 4)"},
      {"T0", "1 / sqrt(mu_xx^2 / 4 - mu_xy mu_yx)"},
      {"t0", "1 / (1/tau0 - 1/T0), tau0 when oscillatory"},
      {"C_xx0", "(mu_yx sigma_x^2 + mu_xy sigma_y^2) / (2 mu_xx mu_yx)"},
      {"C_yy0",
       "(mu_yx^2 sigma_x^2 + (mu_xx^2 + mu_xy mu_yx) sigma_y^2 - 2 mu_xx mu_yx rho sigma_x sigma_y) / "
       "(2 mu_xx mu_xy mu_yx)"},
      {"C_xy0", "-sigma_y^2 / (2 mu_yx)"},
      {"omega_zz", "omega_xx + omega_yy - 2 omega_xy"},
      {"zeta_coexistence", "R_B / R_A"},
  };
  return j;
}

}  // namespace

std::string describe_json(const ExperimentConfig& cfg, int indent) {
  validate(cfg);
  return describe_object(cfg).dump(indent);
}

namespace {

// Human-readable view; the JSON form keeps full precision.
std::string shown(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

void describe_text(const ExperimentConfig& cfg, std::ostream& os) {
  validate(cfg);
  const json j = describe_object(cfg);
  const json& f = j["formulas"];
  auto line = [&](const std::string& name, const json& value, const char* formula = nullptr) {
    std::ostringstream v;
    if (value.is_number_float())
      v << shown(value.get<double>());
    else if (value.is_null())
      v << "inf";
    else if (value.is_string())
      v << value.get<std::string>();
    else
      v << value.dump();
    os << "  " << std::left << std::setw(18) << name;
    if (formula)
      os << std::setw(24) << v.str() << f[formula].get<std::string>();
    else
      os << v.str();
    os << '\n';
  };

  os << "experiment " << j["name"].get<std::string>() << ", N = " << cfg.N << '\n';
  if (j.contains("canonical")) {
    os << "canonical parameters\n";
    for (auto& [k, v] : j["canonical"].items()) line(k, v);
  }
  os << "macro rates (1/min)\n";
  for (auto& [k, v] : j["macro"].items()) line(k, v);

  os << "fixed points\n";
  const json& fp = j["fixed_points"];
  for (const char* name : {"trivial", "extinction", "coexistence"}) {
    const json& p = fp[name];
    std::ostringstream v;
    v << '(' << shown(p["R_A"].get<double>()) << ", " << shown(p["R_B"].get<double>())
      << ") " << p["stability"].get<std::string>();
    os << "  " << std::left << std::setw(18) << name << v.str() << '\n';
  }
  line("M/N", fp["M_over_N"], "M_over_N");
  line("R_A", fp["coexistence"]["R_A"], "R_A");
  line("R_B", fp["coexistence"]["R_B"], "R_B");

  os << "linear-noise constants\n";
  const json& fl = j["fluctuations"];
  for (const char* k : {"mu_xx", "mu_xy", "mu_yx", "sigma_x", "sigma_y", "rho"}) line(k, fl[k], k);
  line("regime", fl["regime"]);
  line("tau0", fl["tau0"], "tau0");
  if (fl.contains("omega0")) {
    line("omega0", fl["omega0"], "omega0");
    os << "  " << std::left << std::setw(18) << "period (min)" << shown(fl["period_min"].get<double>())
       << '\n';
  } else {
    line("T0", fl["T0"], "T0");
  }
  line("t0", fl["t0"], "t0");

  os << "stationary covariances\n";
  const json& c = j["stationary_covariances"];
  for (const char* k : {"C_xx0", "C_yy0", "C_xy0"}) line(k, c[k], k);
  line("Var[n] = N C_xx0", c["var_n"]);
  line("Var[m] = N C_yy0", c["var_m"]);
  line("Cov[n,m]", c["cov_nm"]);

  if (!j["magnification"].is_null()) {
    os << "magnification factors\n";
    for (auto& [k, v] : j["magnification"].items()) line(k, v, k == "omega_zz" ? "omega_zz" : nullptr);
  }
  os << "pricing\n";
  line("zeta (R_B/R_A)", j["pricing"]["zeta_coexistence"], "zeta_coexistence");
}

namespace {

struct ReplicaPlan {
  int index = 0;
  fs::path dir;
  bool keep_events = false;
};

constexpr std::uint64_t kinetic_stream(int replica) { return 2ULL * static_cast<std::uint64_t>(replica); }
constexpr std::uint64_t lna_stream(int replica) { return 2ULL * static_cast<std::uint64_t>(replica) + 1; }

std::vector<PriceModel> enabled_models(const ExperimentConfig& cfg) {
  std::vector<PriceModel> out;
  if (cfg.pricing.excess_demand.enabled) out.push_back(PriceModel::excess_demand);
  if (cfg.pricing.liquidity.enabled) out.push_back(PriceModel::liquidity);
  return out;
}

double recurrence_burn_in(const ExperimentConfig& cfg) {
  return cfg.analytics.recurrence_burn_in ? *cfg.analytics.recurrence_burn_in : cfg.calendar.day_minutes;
}

void write_price(const fs::path& dir, const PriceSeries& ps, const ExperimentConfig& cfg) {
  const std::string tag = to_string(ps.model);
  TableWriter w(dir / ("price_" + tag + ".tsv"), {"time_min", "R", "S"});
  for (std::size_t i = 0; i < ps.size(); ++i) {
    w << ps.times[i] << ps.R[i] << ps.price(i, cfg.pricing.r);
    w.end_row();
  }
  w.close();
  if (ps.times.empty() || ps.times.back() < cfg.calendar.day_minutes) return;
  const PriceSeries cl = closing_prices(ps, cfg.calendar.day_minutes);
  TableWriter c(dir / ("closing_" + tag + ".tsv"), {"day", "time_min", "R", "S"});
  for (std::size_t i = 0; i < cl.size(); ++i) {
    c << static_cast<std::int64_t>(i + 1) << cl.times[i] << cl.R[i] << cl.price(i, cfg.pricing.r);
    c.end_row();
  }
  c.close();
}

PriceSeries read_price(const fs::path& file, PriceModel model, double step) {
  const io::Table t = io::read_table(file);
  PriceSeries ps;
  ps.model = model;
  ps.step = step;
  ps.times = t.numbers("time_min");
  ps.R = t.numbers("R");
  return ps;
}

void write_lagged(const fs::path& file, const char* value_column, const std::vector<double>& values, int first_lag) {
  TableWriter w(file, {"lag", value_column});
  for (std::size_t i = 0; i < values.size(); ++i) {
    w << static_cast<std::int64_t>(first_lag + static_cast<int>(i)) << values[i];
    w.end_row();
  }
  w.close();
}

std::string tau_label(double tau) { return io::format_number(tau); }

json analyze_series(const PriceSeries& ps, const ExperimentConfig& cfg, const fs::path& dir,
                    std::vector<std::string>& skipped) {
  const AnalyticsConfig& a = cfg.analytics;
  const std::string tag = to_string(ps.model);
  json summary;
  summary["model"] = tag;

  auto attempt = [&](const std::string& what, auto&& f) {
    try {
      f();
    } catch (const InsufficientDataError& e) {
      skipped.push_back(tag + " " + what + ": " + e.what());
    }
  };

  // Return distributions.
  {
    TableWriter mw(dir / ("moments_" + tag + ".tsv"),
                   {"tau", "count", "mean", "std", "skewness", "excess_kurtosis"});
    json jm = json::array();
    for (double tau : a.return_taus) {
      attempt("returns tau=" + tau_label(tau), [&] {
        const ReturnSamples rs = fixed_time_returns(ps, tau, ps.step, a.burn_in);
        const MomentSummary m = moments(rs.samples);
        const double nan = std::nan("");
        mw << tau << static_cast<std::uint64_t>(m.count) << m.mean << m.std << m.skewness.value_or(nan)
           << m.excess_kurtosis.value_or(nan);
        mw.end_row();
        jm.push_back({{"tau", tau},
                      {"count", m.count},
                      {"std", m.std},
                      {"skewness", number(m.skewness.value_or(nan))},
                      {"excess_kurtosis", number(m.excess_kurtosis.value_or(nan))}});
        const ReturnSamples st = standardize(rs);
        TableWriter hw(dir / ("histogram_" + tag + "_tau" + tau_label(tau) + ".tsv"), {"bin_center", "density"});
        for (const auto& b : histogram(st.samples, a.histogram_half_width, a.histogram_bins)) {
          hw << b.center << b.density;
          hw.end_row();
        }
        hw.close();
      });
    }
    mw.close();
    summary["moments"] = jm;
  }

  // Volatility scaling; each horizon is tried on its own so a short run still
  // yields the small-tau part of the curve.
  {
    std::vector<ScalingPoint> curve;
    for (double tau : a.scaling_taus) {
      attempt("scaling tau=" + tau_label(tau), [&] {
        const double t[] = {tau};
        const auto pt = volatility_scaling(ps, t, ps.step, a.burn_in);
        curve.push_back(pt.front());
      });
    }
    TableWriter w(dir / ("scaling_" + tag + ".tsv"), {"tau", "std"});
    for (const auto& pt : curve) {
      w << pt.tau << pt.std;
      w.end_row();
    }
    w.close();
    json slopes;
    for (auto [lo, hi] : {std::pair{1.0, 5.0}, std::pair{50.0, 500.0}}) {
      const std::string key = "slope_" + tau_label(lo) + "_" + tau_label(hi);
      slopes[key] = nullptr;
      attempt(key, [&] { slopes[key] = loglog_slope(curve, lo, hi); });
    }
    summary["scaling"] = slopes;
  }

  // Autocorrelation of returns at the grid spacing.
  attempt("return acf", [&] {
    const ReturnSamples rs = fixed_time_returns(ps, ps.step, ps.step, a.burn_in);
    const auto acf = autocorrelation(rs.samples, static_cast<std::size_t>(a.acf_max_lag));
    write_lagged(dir / ("acf_" + tag + ".tsv"), "acf", acf, 0);
    std::size_t arg = 1;
    for (std::size_t k = 1; k < acf.size(); ++k)
      if (acf[k] < acf[arg]) arg = k;
    summary["acf_min"] = {{"lag", arg}, {"value", acf[arg]}};
  });

  // Daily realised volatility, its memory and the leverage correlation.
  attempt("realized volatility", [&] {
    if (ps.times.empty() || ps.times.back() < cfg.calendar.day_minutes)
      throw InsufficientDataError("shorter than one trading day");
    const PriceSeries cl = closing_prices(ps, cfg.calendar.day_minutes);
    const RealizedVolatility rv = realized_volatility(cl.R, a.rv_window,
                                                      default_annualization(a.rv_window, cfg.calendar.year_days));
    if (rv.volatility.empty()) throw InsufficientDataError("fewer sessions than the volatility window");
    TableWriter w(dir / ("realized_vol_" + tag + ".tsv"), {"day", "volatility", "window_return"});
    for (std::size_t i = 0; i < rv.volatility.size(); ++i) {
      w << rv.day[i] << rv.volatility[i] << rv.window_return[i];
      w.end_row();
    }
    w.close();
    attempt("realized volatility acf", [&] {
      const auto acf = autocorrelation(rv.volatility, static_cast<std::size_t>(a.rv_acf_max_lag));
      write_lagged(dir / ("rv_acf_" + tag + ".tsv"), "acf", acf, 0);
      int positive = 0;
      while (positive + 1 < static_cast<int>(acf.size()) && acf[positive + 1] > 0.0) ++positive;
      summary["rv_acf_positive_through"] = positive;
    });
    attempt("leverage", [&] {
      const auto lev = leverage_correlation(rv, a.leverage_max_lag);
      TableWriter lw(dir / ("leverage_" + tag + ".tsv"), {"lag", "xcorr"});
      for (const auto& v : lev) {
        lw << v.lag << v.value;
        lw.end_row();
      }
      lw.close();
    });
  });
  return summary;
}

void write_recurrence(const fs::path& dir, const std::vector<RecurrenceEntry>& entries) {
  TableWriter w(dir / "recurrence.tsv", {"n", "m", "visits", "mean_recurrence_min"});
  for (const auto& e : entries) {
    w << e.n << e.m << e.visits << e.mean_recurrence;
    w.end_row();
  }
  w.close();
}

void write_json(const fs::path& file, const json& j) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  return json::parse(in);
}

void write_meanfield(const fs::path& dir, const ExperimentConfig& cfg, const MacroParams& mp, AgentState init) {
  IntegrationOptions opt;
  opt.output_step = cfg.meanfield_step;
  const double N = init.N;
  const DensityPath path = integrate({init.n / N, init.m / N}, mp, cfg.horizon, opt);
  TableWriter w(dir / "meanfield.tsv", {"time_min", "R_A", "R_B"});
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    w << path.times[i] << path.R_A[i] << path.R_B[i];
    w.end_row();
  }
  w.close();
}

void write_lna(const fs::path& dir, const ExperimentConfig& cfg, const MacroParams& mp, int replica) {
  const FluctConstants fc = fluct_constants(mp);
  Rng rng(cfg.seed, lna_stream(replica));
  const FluctPath path = simulate_sde(fc, cfg.lna.horizon, cfg.lna.dt, rng);
  const PopulationPath pop = reconstruct_populations(path, fixed_points(mp), cfg.N);
  TableWriter w(dir / "lna.tsv", {"time_min", "X", "Y", "n", "m"});
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    w << path.times[i] << path.X[i] << path.Y[i] << pop.n[i] << pop.m[i];
    w.end_row();
  }
  w.close();
}

// Composite sink for one pass of the exact simulation.
struct ReplicaSinks {
  std::optional<TableWriter> events;
  std::optional<GridRecorder> grid;
  std::optional<ExcessDemandPricer> ed;
  std::optional<LiquidityPricer> liq;
  std::optional<RecurrenceTracker> rec;

  void operator()(double t, Channel c, const AgentState& s) {
    if (events) {
      *events << t << to_string(c) << s.n << s.m;
      events->end_row();
    }
    if (grid) (*grid)(t, c, s);
    if (ed) (*ed)(t, c, s);
    if (liq) {
      try {
        (*liq)(t, c, s);
      } catch (const std::exception& e) {
        throw StageError("price", e.what());
      }
    }
    if (rec) (*rec)(t, c, s);
  }
};

json replica_json(const ReplicaReport& r, const fs::path& root) {
  return {{"index", r.index},
          {"seed", r.seed},
          {"stream", r.stream},
          {"dir", r.dir == root ? std::string(".") : fs::relative(r.dir, root).generic_string()},
          {"events", r.events},
          {"end_time_min", r.end_time},
          {"absorbed", r.absorbed},
          {"skipped", r.skipped}};
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest_base(const ExperimentConfig& cfg) {
  json j;
  j["tool"] = "ppm";
  j["version"] = version();
  j["rng_algorithm"] = std::string(kRngAlgorithm);
  j["seed"] = cfg.seed;
  j["config"] = json::parse(to_json_text(cfg));
  return j;
}

ReplicaReport run_replica(const ExperimentConfig& cfg, const ReplicaPlan& plan, bool with_analysis) {
  ReplicaReport rep;
  rep.index = plan.index;
  rep.seed = cfg.seed;
  rep.stream = kinetic_stream(plan.index);
  rep.dir = plan.dir;
  fs::create_directories(plan.dir);

  const MacroParams mp = cfg.macro_params();
  const AgentState init = cfg.initial_state();

  ReplicaSinks sinks;
  const bool keep_events = plan.keep_events || cfg.storage == TrajectoryStorage::full;
  if (keep_events) {
    sinks.events.emplace(plan.dir / "trajectory.tsv", std::vector<std::string>{"time_min", "channel", "n", "m"});
    *sinks.events << 0.0 << std::string_view("initial") << init.n << init.m;
    sinks.events->end_row();
  }
  if (cfg.storage == TrajectoryStorage::grid) sinks.grid.emplace(init, cfg.state_grid_step, cfg.horizon);
  if (with_analysis) {
    if (cfg.pricing.excess_demand.enabled)
      sinks.ed.emplace(init, cfg.pricing_config(PriceModel::excess_demand), cfg.horizon);
    if (cfg.pricing.liquidity.enabled)
      in_stage("price", [&] { sinks.liq.emplace(init, cfg.pricing_config(PriceModel::liquidity), cfg.horizon); });
    if (cfg.analytics.enabled && cfg.analytics.recurrence) sinks.rec.emplace(init, recurrence_burn_in(cfg));
  }

  Rng rng(cfg.seed, rep.stream);
  const RunSummary sum = in_stage("simulate", [&] { return run_events(init, mp, cfg.horizon, rng, sinks); });
  rep.events = sum.events;
  rep.end_time = sum.end_time;
  rep.absorbed = sum.absorbed;
  if (sinks.events) sinks.events->close();

  if (sinks.grid) {
    const StateGrid g = sinks.grid->finish();
    TableWriter w(plan.dir / "populations.tsv", {"time_min", "n", "m"});
    for (std::size_t i = 0; i < g.n.size(); ++i) {
      w << static_cast<double>(i) * g.step << g.n[i] << g.m[i];
      w.end_row();
    }
    w.close();
  }
  if (cfg.meanfield) in_stage("meanfield", [&] { write_meanfield(plan.dir, cfg, mp, init); });
  if (cfg.lna.enabled) in_stage("fluctuations", [&] { write_lna(plan.dir, cfg, mp, plan.index); });

  std::vector<PriceSeries> series;
  if (sinks.ed) series.push_back(sinks.ed->finish());
  if (sinks.liq) series.push_back(in_stage("price", [&] { return sinks.liq->finish(); }));
  for (const auto& ps : series) in_stage("price", [&] { write_price(plan.dir, ps, cfg); });

  if (with_analysis && cfg.analytics.enabled) {
    in_stage("analyze", [&] {
      json summaries = json::array();
      for (const auto& ps : series) summaries.push_back(analyze_series(ps, cfg, plan.dir, rep.skipped));
      if (sinks.rec) write_recurrence(plan.dir, sinks.rec->entries(cfg.analytics.recurrence_min_mean));
      write_json(plan.dir / "analysis.json", summaries);
    });
  }
  return rep;
}

void write_summary(const RunReport& report) {
  TableWriter w(report.dir / "summary.tsv",
                {"replica", "stream", "events", "end_time_min", "absorbed", "model", "tau", "std", "skewness",
                 "excess_kurtosis"});
  for (const auto& r : report.replicas) {
    const fs::path a = r.dir / "analysis.json";
    bool any = false;
    if (fs::exists(a)) {
      for (const auto& model : read_json(a)) {
        for (const auto& m : model["moments"]) {
          auto val = [](const json& v) { return v.is_null() ? std::nan("") : v.get<double>(); };
          w << r.index << r.stream << r.events << r.end_time << (r.absorbed ? 1 : 0)
            << model["model"].get<std::string>() << m["tau"].get<double>() << m["std"].get<double>()
            << val(m["skewness"]) << val(m["excess_kurtosis"]);
          w.end_row();
          any = true;
        }
      }
    }
    if (!any) {
      const double nan = std::nan("");
      w << r.index << r.stream << r.events << r.end_time << (r.absorbed ? 1 : 0) << std::string_view("-") << nan
        << nan << nan << nan;
      w.end_row();
    }
  }
  w.close();
}

RunReport execute(const ExperimentConfig& cfg, bool keep_events, bool with_analysis, const char* stage_name) {
  in_stage("validate", [&] {
    validate(cfg);
    if (cfg.output_dir.empty()) throw ParameterError("no output directory given");
  });
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_now();

  RunReport report;
  report.dir = fs::path(cfg.output_dir);
  fs::create_directories(report.dir);

  std::vector<ReplicaPlan> plans(static_cast<std::size_t>(cfg.replicas));
  for (int k = 0; k < cfg.replicas; ++k) {
    std::ostringstream name;
    name << "replica_" << std::setw(3) << std::setfill('0') << k;
    plans[k] = {k, cfg.replicas == 1 ? report.dir : report.dir / name.str(), keep_events};
  }

  report.replicas.resize(plans.size());
  std::vector<std::exception_ptr> errors(plans.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < plans.size();) {
      try {
        report.replicas[k] = run_replica(cfg, plans[k], with_analysis);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(plans.size(), std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  in_stage("report", [&] {
    if (cfg.replicas > 1 && with_analysis && cfg.analytics.enabled) write_summary(report);
    for (const auto& r : report.replicas) {
      json m = manifest_base(cfg);
      m["stages"] = json::array({stage_name});
      m["replica"] = replica_json(r, r.dir);
      m["started_utc"] = started;
      m["wall_seconds"] = report.wall_seconds;
      if (cfg.replicas > 1) write_json(r.dir / "manifest.json", m);
    }
    json m = manifest_base(cfg);
    m["stages"] = json::array({stage_name});
    json reps = json::array();
    for (const auto& r : report.replicas) reps.push_back(replica_json(r, report.dir));
    m["replicas"] = reps;
    m["started_utc"] = started;
    m["wall_seconds"] = report.wall_seconds;
    write_json(report.dir / "manifest.json", m);
  });
  return report;
}

// Replica directories recorded in a manifest, relative to `dir`.
std::vector<fs::path> replica_dirs(const fs::path& dir) {
  const json m = read_json(dir / "manifest.json");
  std::vector<fs::path> out;
  if (m.contains("replicas") && m["replicas"].size() > 1) {
    for (const auto& r : m["replicas"]) out.push_back(dir / r["dir"].get<std::string>());
  } else {
    out.push_back(dir);
  }
  return out;
}

void add_stage(const fs::path& dir, const std::string& stage) {
  json m = read_json(dir / "manifest.json");
  auto& stages = m["stages"];
  if (std::find(stages.begin(), stages.end(), stage) == stages.end()) stages.push_back(stage);
  write_json(dir / "manifest.json", m);
}

Trajectory read_trajectory(const fs::path& file, int N, double horizon) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string() + " (was the run made with `simulate`?)");
  std::string line;
  std::getline(in, line);
  if (line != "time_min\tchannel\tn\tm") throw std::runtime_error("unexpected trajectory header in " + file.string());
  Trajectory tr;
  bool have_initial = false;
  std::vector<std::string_view> cells(4);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t pos = 0;
    for (int c = 0; c < 4; ++c) {
      const std::size_t tab = c < 3 ? line.find('\t', pos) : line.size();
      if (tab == std::string::npos) throw std::runtime_error("malformed trajectory row: " + line);
      cells[c] = std::string_view(line).substr(pos, tab - pos);
      pos = tab + 1;
    }
    const int n = static_cast<int>(io::parse_number(cells[2]));
    const int m = static_cast<int>(io::parse_number(cells[3]));
    if (!have_initial) {
      if (cells[1] != "initial") throw std::runtime_error("trajectory must start with the initial state");
      tr = Trajectory({n, m, N}, horizon);
      have_initial = true;
      continue;
    }
    const auto ch = channel_from_string(cells[1]);
    if (!ch) throw std::runtime_error("unknown channel '" + std::string(cells[1]) + "'");
    tr.push(io::parse_number(cells[0]), *ch, n, m);
  }
  if (!have_initial) throw std::runtime_error("empty trajectory file");
  tr.set_end(horizon, false);
  return tr;
}

}  // namespace

RunReport run(const ExperimentConfig& cfg) { return execute(cfg, false, true, "run"); }

RunReport simulate(const ExperimentConfig& cfg) { return execute(cfg, true, false, "simulate"); }

ExperimentConfig read_manifest_config(const fs::path& dir) {
  const json m = read_json(dir / "manifest.json");
  if (!m.contains("config")) throw ParameterError("manifest in " + dir.string() + " has no config");
  return parse_config(m["config"].dump());
}

void price(const fs::path& dir) {
  const ExperimentConfig cfg = in_stage("price", [&] { return read_manifest_config(dir); });
  for (const fs::path& rd : replica_dirs(dir)) {
    in_stage("price", [&] {
      const Trajectory tr = read_trajectory(rd / "trajectory.tsv", cfg.N, cfg.horizon);
      for (PriceModel model : enabled_models(cfg)) {
        const PricingConfig pc = cfg.pricing_config(model);
        const PriceSeries ps =
            model == PriceModel::excess_demand ? excess_demand_price(tr, pc) : liquidity_price(tr, pc);
        write_price(rd, ps, cfg);
      }
    });
    if (rd != dir) add_stage(rd, "price");
  }
  add_stage(dir, "price");
}

void analyze(const fs::path& dir) {
  const ExperimentConfig cfg = in_stage("analyze", [&] { return read_manifest_config(dir); });
  for (const fs::path& rd : replica_dirs(dir)) {
    std::vector<std::string> skipped;
    in_stage("analyze", [&] {
      json summaries = json::array();
      for (PriceModel model : enabled_models(cfg)) {
        const fs::path file = rd / ("price_" + to_string(model) + ".tsv");
        if (!fs::exists(file)) throw std::runtime_error("missing " + file.string() + " (run `price` first)");
        summaries.push_back(analyze_series(read_price(file, model, cfg.pricing.grid_step), cfg, rd, skipped));
      }
      if (cfg.analytics.recurrence && fs::exists(rd / "trajectory.tsv")) {
        const Trajectory tr = read_trajectory(rd / "trajectory.tsv", cfg.N, cfg.horizon);
        write_recurrence(rd, recurrence_map(tr, cfg.analytics.recurrence_min_mean, recurrence_burn_in(cfg)));
      }
      write_json(rd / "analysis.json", summaries);
    });
    if (rd != dir) add_stage(rd, "analyze");
  }
  add_stage(dir, "analyze");
}

}  // namespace ppm::harness

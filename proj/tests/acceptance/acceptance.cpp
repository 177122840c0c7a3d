// Acceptance checks. One PASS/FAIL line per criterion; every tolerance and
// seed is fixed below.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "ppm/analytics.hpp"
#include "ppm/config.hpp"
#include "ppm/correlations.hpp"
#include "ppm/experiment.hpp"
#include "ppm/fluctuations.hpp"
#include "ppm/kinetics.hpp"
#include "ppm/pricing.hpp"
#include "ppm/tabular.hpp"

using namespace ppm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

// Market parameter set used by the reference runs.
const CanonicalParams kMarket{0.2, 0.643, 0.4, 0.2, 10.0};
const CanonicalParams kReference{0.2, 0.625, 0.4, 0.2, 10.0};

constexpr int kN = 1000;
constexpr double kYear = 250 * 480.0;
constexpr double kXiExcess = 1e-3;
constexpr double kXiLiquidity = 0.05;
constexpr double kReturnBurnIn = 100.0;
const std::vector<std::uint64_t> kVoteSeeds{1, 2, 3, 4, 5};

template <class F>
void parallel_for(std::size_t count, F&& body) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < count;) body(i);
  };
  const std::size_t threads = std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
}

struct PricedRun {
  PriceSeries excess;
  PriceSeries liquidity;
};

// One kinetic run on the harness stream of replica 0, priced by both rules.
PricedRun priced_run(std::uint64_t seed, double horizon, bool with_liquidity) {
  const MacroParams p = canonical_to_macro(kMarket);
  const AgentState init = coexistence_state(p, kN);
  PricingConfig ed;
  ed.xi = kXiExcess;
  PricingConfig lq;
  lq.xi = kXiLiquidity;
  lq.zeta = coexistence_zeta(p);
  ExcessDemandPricer edp(init, ed, horizon);
  std::optional<LiquidityPricer> lqp;
  if (with_liquidity) lqp.emplace(init, lq, horizon);
  Rng rng(seed, 0);
  run_events(init, p, horizon, rng, [&](double t, Channel c, const AgentState& s) {
    edp(t, c, s);
    if (lqp) (*lqp)(t, c, s);
  });
  PricedRun out;
  out.excess = edp.finish();
  if (lqp) out.liquidity = lqp->finish();
  return out;
}

std::vector<double> minute_acf(const PriceSeries& ps, std::size_t max_lag) {
  return autocorrelation(fixed_time_returns(ps, 1.0, 1.0, kReturnBurnIn).samples, max_lag);
}

bool majority(const std::vector<bool>& votes) {
  return 2 * std::count(votes.begin(), votes.end(), true) > static_cast<long>(votes.size());
}

std::string tally(const std::vector<bool>& votes) {
  return std::to_string(std::count(votes.begin(), votes.end(), true)) + "/" + std::to_string(votes.size());
}

// ---------------------------------------------------------------------------

Outcome c1_constants() {
  constexpr double kExact = 1e-12;
  constexpr double kOmegaZzTol = 0.1;
  constexpr double kOmega0Tol = 1e-6;
  const MacroParams m = canonical_to_macro(kReference);
  const FixedPoints fp = fixed_points(m);
  const FluctConstants fc = fluct_constants(m);
  const Magnification mag = magnification(kReference);
  const MacroParams want{0.7, 0.06, 1.0, 2.5, 0.3};
  bool ok = std::abs(m.gamma_A - want.gamma_A) < kExact && std::abs(m.gamma_B - want.gamma_B) < kExact &&
            std::abs(m.alpha_AA - want.alpha_AA) < kExact && std::abs(m.alpha_AB - want.alpha_AB) < kExact &&
            std::abs(m.beta_AB - want.beta_AB) < kExact;
  ok = ok && std::abs(fp.coexistence.R_A - 0.2) < kExact && std::abs(fp.coexistence.R_B - 0.2) < kExact;
  ok = ok && std::abs(fp.M_over_N - 0.7) < kExact;
  ok = ok && std::abs(mag.omega_zz - 94.2) <= kOmegaZzTol;
  ok = ok && fc.regime == Regime::oscillatory && std::abs(fc.omega0 - 0.141421) <= kOmega0Tol;
  std::ostringstream d;
  d << "macro=(" << m.gamma_A << ", " << m.gamma_B << ", " << m.alpha_AA << ", " << m.alpha_AB << ", " << m.beta_AB
    << ") R=(" << fp.coexistence.R_A << ", " << fp.coexistence.R_B << ") M/N=" << fp.M_over_N
    << " Omega_zz=" << fmt(mag.omega_zz) << " (tol " << kOmegaZzTol << ") omega0=" << fmt(fc.omega0, 9)
    << " (tol " << kOmega0Tol << ") period=" << fmt(2 * M_PI / fc.omega0, 5) << " min";
  return {ok, d.str()};
}

Outcome c2_closed_form() {
  constexpr int kSets = 20;
  constexpr int kPoints = 100;
  constexpr double kRelTol = 1e-6;
  // Relative error is taken against max(|C|, floor * sqrt(C_xx(0) C_yy(0))) so
  // lags at an exact zero of C do not divide by zero.
  constexpr double kFloor = 1e-3;
  Rng rng(20);
  int oscillatory = 0, overdamped = 0;
  double worst = 0.0;
  std::string worst_at;
  for (int s = 0; s < kSets; ++s) {
    const bool want_osc = s % 2 == 0;
    CanonicalParams c;
    do c = oracle::random_canonical(rng);
    while (canonical_overdamped(c) == want_osc);
    const FluctConstants fc = fluct_constants(canonical_to_macro(c));
    (fc.regime == Regime::oscillatory ? oscillatory : overdamped)++;
    const StationaryCovariances cov = stationary_covariances(fc);
    const double scale = kFloor * std::sqrt(cov.C_xx0 * cov.C_yy0);
    for (PairKind k : {PairKind::xx, PairKind::yy, PairKind::xy})
      for (int i = 0; i < kPoints; ++i) {
        const double tau = fc.tau0 * (-5.0 + 10.0 * i / (kPoints - 1));
        const double closed = correlation(k, fc, tau);
        const double quad = correlation_oracle(k, fc, tau).value;
        const double err = std::abs(closed - quad) / std::max(std::abs(quad), scale);
        if (err > worst) {
          worst = err;
          worst_at = "set " + std::to_string(s) + " " + to_string(k) + " tau=" + fmt(tau);
        }
      }
  }
  const bool ok = worst <= kRelTol && oscillatory > 0 && overdamped > 0;
  return {ok, std::to_string(kSets) + " sets (" + std::to_string(oscillatory) + " oscillatory, " +
                  std::to_string(overdamped) + " overdamped) x 3 pairs x " + std::to_string(kPoints) +
                  " lags: worst relative error " + fmt(worst, 3) + " at " + worst_at + " (tol " + fmt(kRelTol) + ")"};
}

Outcome c3_lna_vs_exact() {
  constexpr int kSeeds = 50;
  constexpr double kBurnIn = 200.0;
  constexpr double kSpan = 1e4;
  constexpr double kVarNTol = 0.15;
  constexpr double kVarMTol = 0.20;
  const MacroParams p = canonical_to_macro(kMarket);
  const StationaryCovariances cov = stationary_covariances(fluct_constants(p));
  const AgentState init = coexistence_state(p, kN);
  std::vector<StateGrid> grids(kSeeds);
  parallel_for(kSeeds, [&](std::size_t k) {
    Rng rng(k + 1, 0);
    GridRecorder rec(init, 1.0, kBurnIn + kSpan);
    run_events(init, p, kBurnIn + kSpan, rng, rec);
    grids[k] = rec.finish();
  });
  std::vector<double> n, m;
  for (const StateGrid& g : grids)
    for (std::size_t i = static_cast<std::size_t>(kBurnIn); i < g.n.size(); ++i) {
      n.push_back(g.n[i]);
      m.push_back(g.m[i]);
    }
  const double vn = oracle::variance(n), vm = oracle::variance(m);
  const double corr = oracle::covariance(n, m) / std::sqrt(vn * vm);
  const double wn = kN * cov.C_xx0, wm = kN * cov.C_yy0;
  const double en = std::abs(vn - wn) / wn, em = std::abs(vm - wm) / wm;
  const bool ok = en <= kVarNTol && em <= kVarMTol && corr < 0.0;
  return {ok, "Var[n]=" + fmt(vn) + " vs N*C_xx=" + fmt(wn) + " (rel " + fmt(en, 3) + ", tol " + fmt(kVarNTol) +
                  "); Var[m]=" + fmt(vm) + " vs N*C_yy=" + fmt(wm) + " (rel " + fmt(em, 3) + ", tol " +
                  fmt(kVarMTol) + "); Corr[n,m]=" + fmt(corr, 3) + " (< 0)"};
}

Outcome c4_mean_field_limit() {
  constexpr int kLargeN = 100000;
  constexpr double kSpan = 1e4;
  constexpr double kSigmas = 3.0;
  const MacroParams p = canonical_to_macro(kMarket);
  const FixedPoints fp = fixed_points(p);
  const StationaryCovariances cov = stationary_covariances(fluct_constants(p));
  const AgentState init = coexistence_state(p, kLargeN);
  Rng rng(1, 0);
  GridRecorder rec(init, 1.0, kSpan);
  run_events(init, p, kSpan, rng, rec);
  const StateGrid g = rec.finish();
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < g.n.size(); ++i) {
    sa += g.n[i];
    sb += g.m[i];
  }
  const double ra = sa / g.n.size() / kLargeN, rb = sb / g.m.size() / kLargeN;
  const double ta = kSigmas * std::sqrt(cov.C_xx0 / kLargeN), tb = kSigmas * std::sqrt(cov.C_yy0 / kLargeN);
  const bool ok = std::abs(ra - fp.coexistence.R_A) <= ta && std::abs(rb - fp.coexistence.R_B) <= tb;
  return {ok, "time-averaged (R_A, R_B)=(" + fmt(ra, 7) + ", " + fmt(rb, 7) + ") vs (" + fmt(fp.coexistence.R_A, 7) +
                  ", " + fmt(fp.coexistence.R_B, 7) + "), tolerances (" + fmt(ta, 3) + ", " + fmt(tb, 3) + ")"};
}

Outcome c5_acf_structure() {
  constexpr std::size_t kMaxLag = 60;
  constexpr std::size_t kTau0 = 10;
  constexpr std::size_t kDipLo = 15, kDipHi = 30;
  // A dip is a minimum below this value inside the band.
  constexpr double kDipLevel = -0.05;
  // Decay: by one tau0 the ACF has fallen below half its lag-1 value, and by
  // 50-60 min it is negligible.
  constexpr double kDecayRatio = 0.5;
  constexpr double kTailLevel = 0.05;
  std::vector<std::vector<double>> ed(kVoteSeeds.size()), lq(kVoteSeeds.size());
  parallel_for(kVoteSeeds.size(), [&](std::size_t i) {
    const PricedRun r = priced_run(kVoteSeeds[i], kYear, true);
    ed[i] = minute_acf(r.excess, kMaxLag);
    lq[i] = minute_acf(r.liquidity, kMaxLag);
  });
  auto band_min = [&](const std::vector<double>& a) {
    return *std::min_element(a.begin() + kDipLo, a.begin() + kDipHi + 1);
  };
  std::vector<bool> ed_votes, lq_votes;
  std::ostringstream d;
  d << "ED min ACF[15,30]/ACF(10)/ACF(1):";
  for (std::size_t i = 0; i < ed.size(); ++i) {
    double tail = 0.0;
    for (std::size_t l = 50; l <= kMaxLag; ++l) tail = std::max(tail, std::abs(ed[i][l]));
    const bool decays = ed[i][kTau0] < kDecayRatio * ed[i][1] && tail < kTailLevel;
    ed_votes.push_back(decays && band_min(ed[i]) < kDipLevel);
    d << " " << fmt(band_min(ed[i]), 3) << "/" << fmt(ed[i][kTau0], 3) << "/" << fmt(ed[i][1], 3);
    lq_votes.push_back(band_min(lq[i]) >= kDipLevel);
  }
  d << " (votes " << tally(ed_votes) << "); liquidity min ACF[15,30]:";
  for (const auto& a : lq) d << " " << fmt(band_min(a), 3);
  d << " (no-dip votes " << tally(lq_votes) << ", dip level " << kDipLevel << ")";
  return {majority(ed_votes) && majority(lq_votes), d.str()};
}

Outcome c6_volatility_scaling() {
  constexpr double kShortTol = 0.15, kLongTol = 0.1;
  const std::vector<double> taus = harness::AnalyticsConfig{}.scaling_taus;
  const PricedRun r = priced_run(1, kYear, false);
  const auto curve = volatility_scaling(r.excess, taus, 1.0, kReturnBurnIn);
  const double s1 = loglog_slope(curve, 1, 5), s2 = loglog_slope(curve, 50, 500);
  const bool ok = std::abs(s1 - 1.0) <= kShortTol && std::abs(s2 - 0.5) <= kLongTol;
  return {ok, "slope[1,5]=" + fmt(s1, 4) + " (1 +/- " + fmt(kShortTol) + "), slope[50,500]=" + fmt(s2, 4) +
                  " (0.5 +/- " + fmt(kLongTol) + "), 1 year, seed 1"};
}

Outcome c7_distribution_shape() {
  constexpr double kKurtosisLevel = 3.0;
  std::vector<double> skew(kVoteSeeds.size()), kurt(kVoteSeeds.size());
  parallel_for(kVoteSeeds.size(), [&](std::size_t i) {
    const PricedRun r = priced_run(kVoteSeeds[i], kYear, true);
    skew[i] = moments(fixed_time_returns(r.excess, 10.0, 1.0, kReturnBurnIn).samples).skewness.value_or(NAN);
    kurt[i] = moments(fixed_time_returns(r.liquidity, 1.0, 1.0, kReturnBurnIn).samples).excess_kurtosis.value_or(NAN);
  });
  std::vector<bool> sv, kv;
  std::ostringstream d;
  d << "ED tau=10 skewness:";
  for (double s : skew) {
    sv.push_back(s < 0.0);
    d << " " << fmt(s, 3);
  }
  d << " (negative " << tally(sv) << "); liquidity 1-min excess kurtosis:";
  for (double k : kurt) {
    kv.push_back(k > kKurtosisLevel);
    d << " " << fmt(k, 3);
  }
  d << " (> " << kKurtosisLevel << " " << tally(kv) << ")";
  return {majority(sv) && majority(kv), d.str()};
}

Outcome c8_clustering() {
  constexpr double kYears = 4.0;
  constexpr int kWindow = 20;
  constexpr std::size_t kLags = 60;
  std::vector<std::size_t> positive_through(kVoteSeeds.size());
  parallel_for(kVoteSeeds.size(), [&](std::size_t i) {
    const PricedRun r = priced_run(kVoteSeeds[i], kYears * kYear, false);
    const PriceSeries close = closing_prices(r.excess);
    const RealizedVolatility rv = realized_volatility(close.R, kWindow);
    const auto acf = autocorrelation(rv.volatility, kLags);
    std::size_t l = 1;
    while (l <= kLags && acf[l] > 0.0) ++l;
    positive_through[i] = l - 1;
  });
  std::vector<bool> votes;
  std::ostringstream d;
  d << "realized-vol ACF positive through lag:";
  for (std::size_t v : positive_through) {
    votes.push_back(v >= kLags);
    d << " " << v;
  }
  d << " (need " << kLags << "; votes " << tally(votes) << ", " << kYears << " years each)";
  return {majority(votes), d.str()};
}

std::map<std::string, std::string> data_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    out[fs::relative(e.path(), dir).generic_string()] = os.str();
  }
  return out;
}

Outcome c9_determinism() {
  constexpr int kRoundTripDraws = 100000;
  harness::ExperimentConfig cfg = harness::preset("fig10");
  cfg.horizon = 10 * 480.0;
  cfg.replicas = 2;
  cfg.storage = harness::TrajectoryStorage::full;
  cfg.analytics.rv_window = 2;
  cfg.analytics.rv_acf_max_lag = 2;
  cfg.analytics.leverage_max_lag = 1;
  cfg.analytics.recurrence = true;
  const fs::path a = oracle::scratch("c9_a"), b = oracle::scratch("c9_b");
  cfg.output_dir = a.string();
  harness::run(cfg);
  harness::ExperimentConfig again = cfg;
  again.output_dir = b.string();
  harness::run(again);
  const auto fa = data_files(a), fb = data_files(b);
  const bool identical = !fa.empty() && fa == fb;
  const bool manifest = harness::read_manifest_config(a) == cfg;
  bool presets = true;
  for (const auto& name : harness::preset_names()) {
    const auto p = harness::preset(name);
    presets = presets && harness::parse_config(harness::to_json_text(p)) == p;
  }
  Rng rng(9);
  bool numbers = true;
  for (int i = 0; i < kRoundTripDraws; ++i) {
    const double v = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.uniform() * 200) - 100);
    numbers = numbers && io::parse_number(io::format_number(v)) == v;
  }
  return {identical && manifest && presets && numbers,
          std::to_string(fa.size()) + " data files byte-identical: " + (identical ? "yes" : "no") +
              "; manifest config round-trip: " + (manifest ? "yes" : "no") +
              "; presets round-trip: " + (presets ? "yes" : "no") + "; " + std::to_string(kRoundTripDraws) +
              " numbers round-trip exactly: " + (numbers ? "yes" : "no")};
}

Outcome c10_parameter_domain() {
  constexpr int kDraws = 10000;
  Rng rng(10);
  int bad_macro = 0, bad_rho = 0, bad_stability = 0;
  for (int i = 0; i < kDraws; ++i) {
    const MacroParams m = canonical_to_macro(oracle::random_canonical(rng));
    if (!violations(m).empty()) ++bad_macro;
    const FluctConstants fc = fluct_constants(m);
    if (!(fc.rho >= 0.0 && fc.rho < 0.5)) ++bad_rho;
    const FixedPoints fp = fixed_points(m);
    for (const auto& ev : fp.coexistence.eigenvalues)
      if (!(ev.real() < 0.0)) {
        ++bad_stability;
        break;
      }
  }
  return {bad_macro == 0 && bad_rho == 0 && bad_stability == 0,
          std::to_string(kDraws) + " draws: invariant violations " + std::to_string(bad_macro) + ", rho outside [0,1/2) " +
              std::to_string(bad_rho) + ", non-negative real parts " + std::to_string(bad_stability)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> only;
  app.add_option("--only", only, "run only these criteria (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "constants reproduction", c1_constants},
      {2, "closed form vs quadrature", c2_closed_form},
      {3, "linear noise vs exact simulation", c3_lna_vs_exact},
      {4, "mean-field limit", c4_mean_field_limit},
      {5, "one-minute return ACF structure", c5_acf_structure},
      {6, "volatility scaling", c6_volatility_scaling},
      {7, "return distribution shape", c7_distribution_shape},
      {8, "volatility clustering", c8_clustering},
      {9, "determinism and format", c9_determinism},
      {10, "parameter-domain properties", c10_parameter_domain},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = c.check();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "C" << c.id << " " << c.name << ": " << r.detail << " ["
              << fmt(secs, 3) << " s]" << std::endl;
    failures += !r.pass;
  }
  return failures == 0 ? 0 : 1;
}

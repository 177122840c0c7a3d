#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "ppm/correlations.hpp"
#include "ppm/errors.hpp"
#include "ppm/fluctuations.hpp"
#include "ppm/pricing.hpp"

using namespace ppm;
using doctest::Approx;

namespace {

MacroParams market_params() { return canonical_to_macro({0.2, 0.643, 0.4, 0.2, 10.0}); }

PricingConfig ed_config(double xi = 1e-3) {
  PricingConfig c;
  c.xi = xi;
  return c;
}

PricingConfig liq_config(double zeta, double xi = 0.05) {
  PricingConfig c;
  c.xi = xi;
  c.zeta = zeta;
  return c;
}

// Excess demand summed interval by interval, independent of the pricer's
// grid bookkeeping.
double ed_reference(const Trajectory& tr, double xi, double t) {
  double acc = 0.0, prev = 0.0;
  AgentState s = tr.initial();
  for (std::size_t i = 0; i <= tr.size(); ++i) {
    const double next = i < tr.size() ? std::min(tr.times()[i], t) : t;
    acc += (s.m - s.n) * (next - prev);
    prev = next;
    if (i == tr.size() || tr.times()[i] >= t) break;
    s = tr.state_after(i);
  }
  return xi / tr.initial().N * acc;
}

}  // namespace

TEST_CASE("balanced populations leave the price unchanged") {
  Trajectory tr({150, 150, 1000}, 100.0);
  tr.push(20.0, Channel::annihilate, 149, 149);
  tr.push(70.0, Channel::annihilate, 148, 148);
  tr.set_end(100.0, false);
  PricingConfig cfg = ed_config();
  cfg.R0 = 0.25;
  const PriceSeries ps = excess_demand_price(tr, cfg);
  REQUIRE(ps.size() == 101);
  for (double r : ps.R) CHECK(r == 0.25);
}

TEST_CASE("excess demand of six agents over ten minutes") {
  Trajectory tr({100, 106, 1000}, 10.0);
  tr.set_end(10.0, false);
  const PriceSeries ps = excess_demand_price(tr, ed_config());
  CHECK(ps.R.back() == Approx(6e-5).epsilon(1e-12));
  CHECK(ps.R[5] == Approx(3e-5).epsilon(1e-12));
}

TEST_CASE("excess demand price integrates exactly between events") {
  Rng rng(71);
  const Trajectory tr = simulate({200, 206, 1000}, market_params(), 300.0, rng);
  const PriceSeries ps = excess_demand_price(tr, ed_config());
  REQUIRE(ps.size() == 301);
  for (std::size_t i = 0; i < ps.size(); i += 17)
    CHECK(ps.R[i] == Approx(ed_reference(tr, 1e-3, ps.times[i])).epsilon(1e-12).scale(1e-12));
}

TEST_CASE("excess demand additivity and linearity in xi") {
  Rng rng(72);
  const Trajectory tr = simulate({200, 206, 1000}, market_params(), 500.0, rng);
  PricingConfig a = ed_config(1e-3), b = ed_config(2e-3);
  a.R0 = b.R0 = 0.1;
  const PriceSeries pa = excess_demand_price(tr, a);
  const PriceSeries pb = excess_demand_price(tr, b);
  for (std::size_t i = 0; i < pa.size(); ++i)
    REQUIRE(std::abs((pb.R[i] - 0.1) - 2.0 * (pa.R[i] - 0.1)) <= 1e-15 * (1 + std::abs(pb.R[i])));
  // Splitting the horizon gives the same increment as the whole span.
  for (std::size_t t1 = 100; t1 < 400; t1 += 50) {
    const double whole = pa.R[450] - pa.R[50];
    const double split = (pa.R[450] - pa.R[t1]) + (pa.R[t1] - pa.R[50]);
    CHECK(split == Approx(whole).epsilon(1e-12));
  }
}

TEST_CASE("streaming pricer matches the trajectory pricer") {
  const MacroParams p = market_params();
  const AgentState init{200, 206, 1000};
  Rng a(73), b(73);
  const Trajectory tr = simulate(init, p, 400.0, a);
  ExcessDemandPricer ed(init, ed_config(), 400.0);
  LiquidityPricer lq(init, liq_config(coexistence_zeta(p)), 400.0);
  run_events(init, p, 400.0, b, [&](double t, Channel c, const AgentState& s) {
    ed(t, c, s);
    lq(t, c, s);
  });
  CHECK(ed.finish().R == excess_demand_price(tr, ed_config()).R);
  CHECK(lq.finish().R == liquidity_price(tr, liq_config(coexistence_zeta(p))).R);
}

TEST_CASE("long-run drift follows the time-averaged excess of predators") {
  const MacroParams p = market_params();
  const double xi = 1e-3, T = 120000.0;
  const int N = 1000;
  const AgentState init = coexistence_state(p, N);
  Rng rng(74);
  ExcessDemandPricer ed(init, ed_config(xi), T);
  double last = 0.0, area = 0.0;
  int excess = init.m - init.n;
  run_events(init, p, T, rng, [&](double t, Channel c, const AgentState& s) {
    ed(t, c, s);
    area += excess * (t - last);
    last = t;
    excess = s.m - s.n;
  });
  area += excess * (T - last);
  const PriceSeries ps = ed.finish();
  const double got = ps.R.back() - ps.R.front();
  CHECK(got == Approx(xi * area / N).epsilon(1e-9));
  // At N = 1000 both populations sit O(1) agents off the deterministic
  // fixed point, so the mean excess is well below N (R_B - R_A).
  const FixedPoints fp = fixed_points(p);
  const double mean_excess = area / T;
  CHECK(std::abs(mean_excess) < N * (fp.coexistence.R_B - fp.coexistence.R_A));
}

TEST_CASE("liquidity increment example") {
  CHECK(liquidity_increment(200, 206, 1.0288, 0.05, 1.0, 0.1) == Approx(6e-6).epsilon(1e-9));
  CHECK(liquidity_gate(-1e-9, 1.0) == 0.0);
  CHECK(liquidity_gate(1e-9, 0.0) == 1.0);
  CHECK(liquidity_gate(0.0, 1.0) == 1.0);
  CHECK(liquidity_gate(0.0, 0.0) == 0.0);

  LiquidityPricer lq({200, 206, 1000}, liq_config(1.0288), 1.0);
  lq(0.1, Channel::death_A, {199, 206, 1000});
  CHECK(lq.last_increment() == Approx(6e-6).epsilon(1e-9));
}

TEST_CASE("negative increment blocks the next one") {
  LiquidityPricer lq({200, 150, 1000}, liq_config(1.0), 10.0);
  lq(1.0, Channel::birth_A, {201, 150, 1000});
  CHECK(lq.last_increment() < 0.0);
  lq(2.0, Channel::predate, {200, 300, 1000});
  CHECK(lq.last_increment() == 0.0);
  CHECK(lq.gated_updates() == 1);
  // Zero previous increment with the default convention lets the next one through.
  lq(3.0, Channel::death_A, {199, 300, 1000});
  CHECK(lq.last_increment() > 0.0);
}

TEST_CASE("frozen start un-freezes with the default convention") {
  LiquidityPricer open({200, 230, 1000}, liq_config(1.0), 10.0);
  open(0.5, Channel::death_A, {199, 230, 1000});
  CHECK(open.last_increment() > 0.0);

  PricingConfig shut = liq_config(1.0);
  shut.theta_at_zero = 0.0;
  LiquidityPricer closed({200, 230, 1000}, shut, 10.0);
  for (int k = 1; k <= 5; ++k) {
    closed(0.5 * k, Channel::death_B, {200, 230 - k, 1000});
    CHECK(closed.last_increment() == 0.0);
  }
  CHECK(closed.finish().R.back() == 0.0);
}

TEST_CASE("liquidity gating along a simulated path") {
  const MacroParams p = market_params();
  const double zeta = coexistence_zeta(p);
  const PricingConfig cfg = liq_config(zeta);
  const AgentState init{200, 206, 1000};
  LiquidityPricer lq(init, cfg, 2000.0);
  Rng rng(75);
  double prev_inc = 0.0, prev_t = 0.0;
  AgentState held = init;
  std::size_t zeros = 0, events = 0;
  run_events(init, p, 2000.0, rng, [&](double t, Channel c, const AgentState& s) {
    lq(t, c, s);
    const double inc = lq.last_increment();
    const double free = cfg.xi * (static_cast<double>(held.m) / held.n - zeta) * (t - prev_t);
    if (prev_inc < 0.0)
      REQUIRE(inc == 0.0);
    else
      REQUIRE(inc == Approx(free).epsilon(1e-12).scale(1e-18));
    zeros += inc == 0.0;
    ++events;
    prev_inc = inc;
    prev_t = t;
    held = s;
  });
  CHECK(zeros == lq.gated_updates());
  CHECK(events == lq.updates());
  CHECK(zeros > events / 10);
}

TEST_CASE("no liquidity providers is a hard error") {
  Trajectory tr({1, 5, 100}, 10.0);
  tr.push(1.0, Channel::death_A, 0, 5);
  tr.push(2.0, Channel::death_B, 0, 4);
  tr.set_end(10.0, false);
  try {
    (void)liquidity_price(tr, liq_config(1.0));
    FAIL("expected a pricing error");
  } catch (const PricingError& e) {
    CHECK(e.event_time() == 2.0);
  }
}

TEST_CASE("large-N agreement with the fluctuation form") {
  // zeta = R_B°/R_A° = 1 on the reference set, where the two increments coincide.
  const MacroParams p{0.7, 0.06, 1.0, 2.5, 0.3};
  const FixedPoints fp = fixed_points(p);
  const double ra = fp.coexistence.R_A, rb = fp.coexistence.R_B;
  const double zeta = coexistence_zeta(p);
  REQUIRE(zeta == Approx(1.0));
  Rng rng(76);
  double prev_err = 0.0;
  for (double N : {1e4, 1e6, 1e8}) {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double X = 2 * rng.normal(), Y = rng.normal();
      const double n = N * ra + std::sqrt(N) * X, m = N * rb + std::sqrt(N) * Y;
      const double exact = liquidity_increment(n, m, zeta, 0.05, 1.0, 0.1);
      const double lna = 0.05 / std::sqrt(N) * (Y / rb - X / ra) * 0.1;
      worst = std::max(worst, std::abs(exact - lna) * std::sqrt(N));
    }
    // Relative to the leading term, the mismatch is O(1/sqrt(N)).
    if (prev_err > 0.0) CHECK(worst < prev_err / 5.0);
    prev_err = worst;
  }
}

TEST_CASE("closing prices") {
  PriceSeries ps;
  ps.step = 1.0;
  for (int i = 0; i <= 960; ++i) {
    ps.times.push_back(i);
    ps.R.push_back(0.001 * i);
  }
  const PriceSeries c = closing_prices(ps);
  REQUIRE(c.size() == 2);
  CHECK(c.times[0] == 480.0);
  CHECK(c.times[1] == 960.0);
  CHECK(c.R[0] == ps.R[480]);
  CHECK(c.R[1] == ps.R[960]);

  PriceSeries year30;
  year30.step = 1.0;
  year30.R.assign(30 * 250 * 480 + 1, 0.0);
  year30.times.resize(year30.R.size());
  CHECK(closing_prices(year30).size() == 7500);

  PriceSeries short_series;
  short_series.step = 1.0;
  short_series.R.assign(100, 0.0);
  short_series.times.assign(100, 0.0);
  CHECK_THROWS_AS(closing_prices(short_series), InsufficientDataError);
}

TEST_CASE("closing value uses exact right-continuous evaluation") {
  Trajectory tr({100, 110, 1000}, 960.0);
  tr.push(480.0, Channel::death_A, 99, 110);
  tr.set_end(960.0, false);
  // The event at 480 applies the increment over [0, 480) and the close sees it.
  const PriceSeries c = closing_prices(liquidity_price(tr, liq_config(1.0, 0.01)));
  CHECK(c.R[0] == Approx(0.01 * 0.1 * 480.0));
  const PriceSeries d = closing_prices(excess_demand_price(tr, ed_config()));
  CHECK(d.R[0] == Approx(1e-6 * 10 * 480.0));
  CHECK(d.R[1] == Approx(1e-6 * (10 + 11) * 480.0));
}

TEST_CASE("configuration checks and undiscounted price") {
  PricingConfig bad;
  bad.xi = 0.0;
  CHECK_THROWS_AS(validate(bad), ParameterError);
  bad = PricingConfig{};
  bad.zeta = -1.0;
  CHECK_THROWS_AS(validate(bad), ParameterError);
  PriceSeries ps;
  ps.times = {0.0, 10.0};
  ps.R = {0.0, 0.5};
  CHECK(ps.price(1, 0.01) == Approx(std::exp(0.6)));
  CHECK(price_model_from_string(to_string(PriceModel::liquidity)) == PriceModel::liquidity);
  CHECK(price_model_from_string("other") == std::nullopt);
}

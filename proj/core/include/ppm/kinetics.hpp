#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ppm/errors.hpp"
#include "ppm/parameters.hpp"
#include "ppm/rng.hpp"

namespace ppm {

/// Counts of preys (A) and predators (B) among N agents; the rest are neutral.
struct AgentState {
  int n = 0;
  int m = 0;
  int N = 0;

  int neutral() const noexcept { return N - n - m; }
  bool valid() const noexcept { return N >= 2 && n >= 0 && m >= 0 && n + m <= N; }
  bool operator==(const AgentState&) const = default;
};

/// The five reaction channels, in the order used for channel selection.
enum class Channel : std::uint8_t { death_A = 0, death_B, annihilate, predate, birth_A };

inline constexpr std::array<Channel, 5> kChannels = {Channel::death_A, Channel::death_B, Channel::annihilate,
                                                     Channel::predate, Channel::birth_A};

std::string_view to_string(Channel c);
std::optional<Channel> channel_from_string(std::string_view s);

struct Increment {
  int dn;
  int dm;
};

constexpr Increment increment(Channel c) {
  switch (c) {
    case Channel::death_A: return {-1, 0};
    case Channel::death_B: return {0, -1};
    case Channel::annihilate: return {-1, -1};
    case Channel::predate: return {-1, +1};
    case Channel::birth_A: return {+1, 0};
  }
  return {0, 0};
}

constexpr AgentState apply(AgentState s, Channel c) {
  const Increment d = increment(c);
  s.n += d.dn;
  s.m += d.dm;
  return s;
}

struct RateVector {
  std::array<double, 5> rate{};

  double operator[](Channel c) const noexcept { return rate[static_cast<std::size_t>(c)]; }
  double total() const noexcept { return rate[0] + rate[1] + rate[2] + rate[3] + rate[4]; }
};

/// Per-state jump rates of the master equation. The predator death channel
/// is proportional to m.
RateVector event_rates(const AgentState& s, const MacroParams& p);

/// Precomputed channel coefficients for a fixed (MacroParams, N).
class Propensities {
 public:
  Propensities(const MacroParams& p, int N);

  RateVector operator()(int n, int m) const noexcept {
    RateVector r;
    const double nm = static_cast<double>(n) * m;
    r.rate[0] = death_A_ * n;
    r.rate[1] = death_B_ * m;
    r.rate[2] = annihilate_ * nm;
    r.rate[3] = predate_ * nm;
    r.rate[4] = birth_A_ * n * (N_ - n - m);
    return r;
  }

  int N() const noexcept { return N_; }

 private:
  double death_A_, death_B_, annihilate_, predate_, birth_A_;
  int N_;
};

struct Step {
  double dt;
  Channel channel;
  AgentState state;
};

/// One draw of the direct method: exponential waiting time with the total
/// rate, channel chosen in proportion to its rate.
/// Throws AbsorbingStateError when every rate vanishes.
Step step(const AgentState& s, const MacroParams& p, Rng& rng);

/// Same as above with precomputed coefficients; the hot path.
inline Step step(const AgentState& s, const Propensities& prop, Rng& rng) {
  const RateVector r = prop(s.n, s.m);
  const double total = r.total();
  if (!(total > 0.0)) throw AbsorbingStateError("all event rates vanish at the current state");
  const double dt = rng.exponential(total);
  double target = rng.uniform() * total;
  std::size_t k = 0;
  for (; k < 4; ++k) {
    if (target < r.rate[k]) break;
    target -= r.rate[k];
  }
  // Round-off can push the target past the last nonzero channel.
  while (r.rate[k] == 0.0) --k;
  const auto c = static_cast<Channel>(k);
  return {dt, c, apply(s, c)};
}

struct RunSummary {
  AgentState final_state;
  double end_time = 0.0;  ///< horizon, or the absorption time when absorbed
  bool absorbed = false;
  std::uint64_t events = 0;
};

/// Drive the exact simulation up to `horizon`, handing every event to `sink`
/// as sink(time, channel, post_event_state). The first event past the horizon
/// is drawn but neither applied nor reported. Absorption before the horizon
/// stops the run and is reported in the summary, not thrown.
template <class Sink>
RunSummary run_events(AgentState init, const MacroParams& p, double horizon, Rng& rng, Sink&& sink) {
  if (!init.valid()) throw ParameterError("initial agent state violates 0 <= n, m and n + m <= N");
  if (!(horizon > 0.0)) throw ParameterError("horizon must be > 0");
  const Propensities prop(p, init.N);
  RunSummary out;
  out.final_state = init;
  AgentState s = init;
  double t = 0.0;
  for (;;) {
    const RateVector r = prop(s.n, s.m);
    if (!(r.total() > 0.0)) {
      out.absorbed = true;
      out.end_time = t;
      break;
    }
    const Step st = step(s, prop, rng);
    double next = t + st.dt;
    if (next <= t) next = std::nextafter(t, horizon + 1.0);
    if (next > horizon) {
      out.end_time = horizon;
      break;
    }
    t = next;
    s = st.state;
    ++out.events;
    sink(t, st.channel, s);
  }
  out.final_state = s;
  return out;
}

/// Full event log of one realisation; the population path is piecewise
/// constant and right-continuous.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(AgentState init, double horizon) : initial_(init), horizon_(horizon) {}

  void push(double time, Channel c, int n, int m) {
    times_.push_back(time);
    channels_.push_back(c);
    n_.push_back(n);
    m_.push_back(m);
  }
  void reserve(std::size_t k);

  const AgentState& initial() const noexcept { return initial_; }
  double horizon() const noexcept { return horizon_; }
  bool absorbed() const noexcept { return absorbed_; }
  double end_time() const noexcept { return end_time_; }
  void set_end(double end_time, bool absorbed) {
    end_time_ = end_time;
    absorbed_ = absorbed;
  }

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  std::span<const double> times() const noexcept { return times_; }
  std::span<const Channel> channels() const noexcept { return channels_; }
  std::span<const std::int32_t> prey() const noexcept { return n_; }
  std::span<const std::int32_t> predators() const noexcept { return m_; }

  AgentState state_after(std::size_t event) const { return {n_[event], m_[event], initial_.N}; }

  /// State holding at time t (the state after the last event with time <= t).
  AgentState state_at(double t) const;

  /// Replay every event into a sink with the run_events() signature.
  template <class Sink>
  void replay(Sink&& sink) const {
    for (std::size_t i = 0; i < times_.size(); ++i) sink(times_[i], channels_[i], state_after(i));
  }

  /// Check ordering, single-channel increments and state bounds.
  /// Returns a description of the first violation, if any.
  std::optional<std::string> check_invariants() const;

 private:
  AgentState initial_;
  double horizon_ = 0.0;
  double end_time_ = 0.0;
  bool absorbed_ = false;
  std::vector<double> times_;
  std::vector<Channel> channels_;
  std::vector<std::int32_t> n_;
  std::vector<std::int32_t> m_;
};

Trajectory simulate(AgentState init, const MacroParams& p, double horizon, Rng& rng);

/// States at the requested (ascending) times. Throws std::out_of_range for a
/// time outside [0, horizon].
std::vector<AgentState> sample_at(const Trajectory& tr, std::span<const double> times);

/// Populations on a uniform grid, for runs too long to keep every event.
struct StateGrid {
  double step = 1.0;
  int N = 0;
  std::vector<std::int32_t> n;  ///< n[k] is the state at time k * step
  std::vector<std::int32_t> m;
};

/// Sink that records the state on a uniform grid as events stream past.
class GridRecorder {
 public:
  GridRecorder(AgentState init, double step, double horizon);
  void operator()(double t, Channel, const AgentState& s);
  /// Fill the remaining grid points with the final state.
  StateGrid finish();

 private:
  StateGrid grid_;
  std::size_t points_;
  AgentState current_;
};

/// Starting point at the rounded coexistence densities.
AgentState coexistence_state(const MacroParams& p, int N);

}  // namespace ppm

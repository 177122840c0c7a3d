#include "ppm/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ppm {

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::death_A: return "death_A";
    case Channel::death_B: return "death_B";
    case Channel::annihilate: return "annihilate";
    case Channel::predate: return "predate";
    case Channel::birth_A: return "birth_A";
  }
  return "?";
}

std::optional<Channel> channel_from_string(std::string_view s) {
  for (Channel c : kChannels)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

Propensities::Propensities(const MacroParams& p, int N) : N_(N) {
  validate(p);
  if (N < 2) throw ParameterError("N must be >= 2");
  const double pair = 1.0 / (N - 1);
  death_A_ = p.prey_death_rate();
  death_B_ = p.gamma_B;
  annihilate_ = std::max(0.0, p.annihilation_coefficient()) * pair;
  predate_ = p.predation_coefficient() * pair;
  birth_A_ = p.alpha_AA * pair;
}

RateVector event_rates(const AgentState& s, const MacroParams& p) {
  if (!s.valid()) throw ParameterError("agent state violates 0 <= n, m and n + m <= N");
  return Propensities(p, s.N)(s.n, s.m);
}

Step step(const AgentState& s, const MacroParams& p, Rng& rng) {
  if (!s.valid()) throw ParameterError("agent state violates 0 <= n, m and n + m <= N");
  return step(s, Propensities(p, s.N), rng);
}

void Trajectory::reserve(std::size_t k) {
  times_.reserve(k);
  channels_.reserve(k);
  n_.reserve(k);
  m_.reserve(k);
}

AgentState Trajectory::state_at(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return initial_;
  return state_after(static_cast<std::size_t>(it - times_.begin()) - 1);
}

std::optional<std::string> Trajectory::check_invariants() const {
  AgentState prev = initial_;
  double t_prev = 0.0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    std::ostringstream os;
    if (!(times_[i] > t_prev)) {
      os << "event " << i << ": time " << times_[i] << " does not exceed " << t_prev;
      return os.str();
    }
    const AgentState expect = apply(prev, channels_[i]);
    const AgentState got = state_after(i);
    if (!(expect == got)) {
      os << "event " << i << ": state does not match channel " << to_string(channels_[i]);
      return os.str();
    }
    if (!got.valid()) {
      os << "event " << i << ": state out of bounds";
      return os.str();
    }
    prev = got;
    t_prev = times_[i];
  }
  if (!times_.empty() && times_.back() > horizon_) return std::string("event past the horizon");
  return std::nullopt;
}

Trajectory simulate(AgentState init, const MacroParams& p, double horizon, Rng& rng) {
  Trajectory tr(init, horizon);
  const RunSummary sum = run_events(init, p, horizon, rng, [&](double t, Channel c, const AgentState& s) {
    tr.push(t, c, s.n, s.m);
  });
  tr.set_end(sum.end_time, sum.absorbed);
  return tr;
}

std::vector<AgentState> sample_at(const Trajectory& tr, std::span<const double> times) {
  std::vector<AgentState> out;
  out.reserve(times.size());
  const auto ev = tr.times();
  std::size_t k = 0;  // number of events with time <= current query
  double last = -std::numeric_limits<double>::infinity();
  for (double t : times) {
    if (t < 0.0 || t > tr.horizon()) throw std::out_of_range("sample time outside [0, horizon]");
    if (t < last) throw std::invalid_argument("sample times must be ascending");
    last = t;
    while (k < ev.size() && ev[k] <= t) ++k;
    out.push_back(k == 0 ? tr.initial() : tr.state_after(k - 1));
  }
  return out;
}

GridRecorder::GridRecorder(AgentState init, double step, double horizon) : current_(init) {
  if (!(step > 0.0)) throw ParameterError("grid step must be > 0");
  grid_.step = step;
  grid_.N = init.N;
  points_ = static_cast<std::size_t>(std::floor(horizon / step + 1e-9)) + 1;
  grid_.n.reserve(points_);
  grid_.m.reserve(points_);
}

void GridRecorder::operator()(double t, Channel, const AgentState& s) {
  // Grid points strictly before t still see the pre-event state; a point at
  // exactly t sees the post-event one (right continuity), so it is left for
  // the next call or finish().
  while (grid_.n.size() < points_ && static_cast<double>(grid_.n.size()) * grid_.step < t) {
    grid_.n.push_back(current_.n);
    grid_.m.push_back(current_.m);
  }
  current_ = s;
}

StateGrid GridRecorder::finish() {
  while (grid_.n.size() < points_) {
    grid_.n.push_back(current_.n);
    grid_.m.push_back(current_.m);
  }
  return std::move(grid_);
}

AgentState coexistence_state(const MacroParams& p, int N) {
  const FixedPoints fps = fixed_points(p);
  AgentState s;
  s.N = N;
  s.n = static_cast<int>(std::lround(N * fps.coexistence.R_A));
  s.m = static_cast<int>(std::lround(N * fps.coexistence.R_B));
  return s;
}

}  // namespace ppm

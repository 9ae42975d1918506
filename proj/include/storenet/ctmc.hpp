#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "storenet/model.hpp"
#include "storenet/rng.hpp"

namespace storenet {

/// The four jumps of the file-replication chain. `None` marks rows that are
/// not produced by a jump (the initial row and grid snapshots).
enum class TransitionKind : std::uint8_t { Admission, Duplication, DoubleLoss, SingleLoss, None };

std::string_view to_string(TransitionKind kind);

struct Transition {
  TransitionKind kind;
  double rate;
};

/// Rates of the four transitions at `state`, zero where the guard fails.
/// Indexed by TransitionKind.
struct RateTable {
  std::array<double, 4> rate{};
  double total = 0.0;
};

/// Admission needs m >= 2, duplication needs x1 > 0 and m >= 1.
inline RateTable transition_rates(const SystemState& s, const ModelParams& p, const ScaledParams& scaled) {
  const double n = static_cast<double>(scaled.N);
  const bool infinite = scaled.F_N.is_infinite();
  const std::int64_t m = infinite ? 0 : scaled.F_N.value() - occupied(s);
  RateTable t;
  t.rate[0] = (infinite || m >= 2) ? p.xi * n : 0.0;
  t.rate[1] = (s.x1 > 0 && (infinite || m >= 1)) ? p.lambda * n : 0.0;
  t.rate[2] = 2.0 * p.mu * static_cast<double>(s.x2);
  t.rate[3] = p.mu * static_cast<double>(s.x1);
  t.total = t.rate[0] + t.rate[1] + t.rate[2] + t.rate[3];
  return t;
}

inline SystemState apply(SystemState s, TransitionKind kind) {
  switch (kind) {
    case TransitionKind::Admission: s.x2 += 1; break;
    case TransitionKind::Duplication: s.x1 -= 1; s.x2 += 1; break;
    case TransitionKind::DoubleLoss: s.x1 += 1; s.x2 -= 1; break;
    case TransitionKind::SingleLoss: s.x1 -= 1; s.x0 += 1; break;
    case TransitionKind::None: break;
  }
  return s;
}

/// Enabled transitions (positive rate, guard satisfied) in TransitionKind order.
std::vector<Transition> enabled_transitions(const SystemState& state, const ModelParams& params,
                                            const ScaledParams& scaled);

struct RunOutcome {
  SystemState final_state;
  double end_time = 0.0;    // horizon, or the time the observer stopped the run
  std::uint64_t events = 0;
  bool frozen = false;      // total rate hit zero before the horizon
  bool stopped = false;     // observer asked to stop
};

/// Event-driven exact simulation on [0, horizon]: exponential holding time
/// at the total rate, then a categorical draw of the jump. The observer is
/// called as `bool(double t, TransitionKind, const SystemState& before,
/// const SystemState& after)` and returns false to stop.
template <class Observer>
RunOutcome run_chain(const ModelParams& params, const ScaledParams& scaled, SystemState state,
                     double horizon, Stream& rng, Observer&& observer) {
  RunOutcome out;
  double t = 0.0;
  for (;;) {
    const RateTable rates = transition_rates(state, params, scaled);
    if (rates.total <= 0.0) {
      out.frozen = true;
      t = horizon;
      break;
    }
    const double next = t + rng.exponential(rates.total);
    if (next > horizon) {
      t = horizon;
      break;
    }
    t = next;
    const double u = rng.uniform() * rates.total;
    std::size_t k = 0;
    double acc = rates.rate[0];
    while (k < 3 && u >= acc) acc += rates.rate[++k];
    // Rounding can leave k on a disabled slot; fall back to the last enabled one.
    while (rates.rate[k] == 0.0) --k;
    const auto kind = static_cast<TransitionKind>(k);
    const SystemState before = state;
    state = apply(state, kind);
    ++out.events;
    if (!observer(t, kind, before, state)) {
      out.stopped = true;
      break;
    }
  }
  out.final_state = state;
  out.end_time = t;
  return out;
}

/// How a Path is stored: every event, or snapshots every dt.
struct Recording {
  enum class Mode { Events, Grid };
  Mode mode = Mode::Events;
  double dt = 0.0;

  static Recording events() { return {}; }
  static Recording grid(double dt);
};

struct PathPoint {
  double t;
  SystemState state;
  TransitionKind kind;
};

/// Piecewise-constant right-continuous trajectory. In event mode the first
/// row is the initial state at t = 0 and each further row is the post-jump
/// state; in grid mode rows are snapshots at k * dt.
struct Path {
  ScaledParams scaled;
  double horizon = 0.0;
  Recording recording;
  std::vector<PathPoint> points;
  std::uint64_t events = 0;
  bool frozen = false;

  /// State at time t (post-jump at event times). Throws OUT_OF_RANGE.
  const SystemState& state_at(double t) const;
};

/// Deterministic given (seed, replica).
Path simulate_path(const ModelParams& params, const ScaledParams& scaled, const SystemState& init,
                   double horizon, std::uint64_t seed, std::uint64_t replica = 0,
                   Recording recording = Recording::events());

/// (x1(t)/N, x2(t)/N).
Vec2 scaled_state(const Path& path, double t, std::int64_t N);

/// First event time with m <= 1; 0 if m(0) <= 1; nullopt if not hit.
/// Needs an event-mode path with finite F_N.
std::optional<double> hitting_time_T1(const Path& path);

/// Same as hitting_time_T1 without storing the path; the run stops at the hit.
std::optional<double> first_saturation_time(const ModelParams& params, const ScaledParams& scaled,
                                            const SystemState& init, double max_horizon,
                                            std::uint64_t seed, std::uint64_t replica);

/// Set of free-capacity values, or the whole extended naturals.
struct OccupationQuery {
  double t = 0.0;
  std::vector<std::int64_t> gamma;
  bool whole_space = false;
};

/// Lebesgue time spent on [0, t] with m in gamma. Event-mode path, finite F_N.
double occupation_measure(const Path& path, const OccupationQuery& query);

/// Time fractions of m over [t_lo, t_hi] for m = 0..n_max, then an overflow
/// bucket for m > n_max.
std::vector<double> windowed_m_histogram(const Path& path, double t_lo, double t_hi, std::int64_t n_max);

}  // namespace storenet

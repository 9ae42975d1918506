#include "storenet/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace storenet {

std::string_view to_string(TransitionKind kind) {
  switch (kind) {
    case TransitionKind::Admission: return "admission";
    case TransitionKind::Duplication: return "duplication";
    case TransitionKind::DoubleLoss: return "double_loss";
    case TransitionKind::SingleLoss: return "single_loss";
    case TransitionKind::None: return "none";
  }
  return "?";
}

std::vector<Transition> enabled_transitions(const SystemState& state, const ModelParams& params,
                                            const ScaledParams& scaled) {
  free_capacity(state, scaled);  // rejects states outside D^N
  const RateTable t = transition_rates(state, params, scaled);
  std::vector<Transition> out;
  for (std::size_t k = 0; k < 4; ++k)
    if (t.rate[k] > 0.0) out.push_back({static_cast<TransitionKind>(k), t.rate[k]});
  return out;
}

Recording Recording::grid(double dt) {
  if (!(dt > 0.0)) throw Error("INVALID_RECORDING", "grid spacing must be positive");
  return {Mode::Grid, dt};
}

const SystemState& Path::state_at(double t) const {
  if (!(t >= 0.0 && t <= horizon) || points.empty()) {
    std::ostringstream os;
    os << "t = " << t << " outside [0, " << horizon << "]";
    throw Error("OUT_OF_RANGE", os.str());
  }
  auto it = std::upper_bound(points.begin(), points.end(), t,
                             [](double v, const PathPoint& p) { return v < p.t; });
  return std::prev(it)->state;
}

Path simulate_path(const ModelParams& params, const ScaledParams& scaled, const SystemState& init,
                   double horizon, std::uint64_t seed, std::uint64_t replica, Recording recording) {
  if (!(horizon > 0.0)) throw Error("INVALID_HORIZON", "horizon must be positive");
  validate(scaled);
  free_capacity(init, scaled);

  Path path;
  path.scaled = scaled;
  path.horizon = horizon;
  path.recording = recording;
  path.points.push_back({0.0, init, TransitionKind::None});

  Stream rng(seed, replica);
  RunOutcome outcome;
  if (recording.mode == Recording::Mode::Events) {
    outcome = run_chain(params, scaled, init, horizon, rng,
                        [&](double t, TransitionKind kind, const SystemState&, const SystemState& after) {
                          path.points.push_back({t, after, kind});
                          return true;
                        });
  } else {
    const auto slots = static_cast<std::size_t>(std::floor(horizon / recording.dt + 1e-9));
    path.points.reserve(slots + 1);
    std::size_t next = 1;
    auto fill_until = [&](double t_exclusive, const SystemState& s) {
      while (next <= slots && static_cast<double>(next) * recording.dt < t_exclusive) {
        path.points.push_back({static_cast<double>(next) * recording.dt, s, TransitionKind::None});
        ++next;
      }
    };
    outcome = run_chain(params, scaled, init, horizon, rng,
                        [&](double t, TransitionKind, const SystemState& before, const SystemState&) {
                          fill_until(t, before);
                          return true;
                        });
    fill_until(horizon + recording.dt, outcome.final_state);
  }
  path.events = outcome.events;
  path.frozen = outcome.frozen;
  return path;
}

Vec2 scaled_state(const Path& path, double t, std::int64_t N) {
  const SystemState& s = path.state_at(t);
  const double n = static_cast<double>(N);
  return {static_cast<double>(s.x1) / n, static_cast<double>(s.x2) / n};
}

namespace {

void require_event_path(const Path& path, const char* what) {
  if (path.recording.mode != Recording::Mode::Events)
    throw Error("NEEDS_EVENT_PATH", std::string(what) + " needs an event-mode path");
  if (path.scaled.F_N.is_infinite())
    throw Error("INFINITE_CAPACITY", std::string(what) + " is undefined for F_N = infinite");
}

std::int64_t m_of(const Path& path, const SystemState& s) {
  return path.scaled.F_N.value() - occupied(s);
}

}  // namespace

std::optional<double> hitting_time_T1(const Path& path) {
  require_event_path(path, "hitting_time_T1");
  for (const PathPoint& p : path.points)
    if (m_of(path, p.state) <= 1) return p.t;
  return std::nullopt;
}

std::optional<double> first_saturation_time(const ModelParams& params, const ScaledParams& scaled,
                                            const SystemState& init, double max_horizon,
                                            std::uint64_t seed, std::uint64_t replica) {
  if (scaled.F_N.is_infinite())
    throw Error("INFINITE_CAPACITY", "first_saturation_time is undefined for F_N = infinite");
  const std::int64_t F = scaled.F_N.value();
  if (F - occupied(init) <= 1) return 0.0;
  Stream rng(seed, replica);
  std::optional<double> hit;
  run_chain(params, scaled, init, max_horizon, rng,
            [&](double t, TransitionKind, const SystemState&, const SystemState& after) {
              if (F - occupied(after) <= 1) {
                hit = t;
                return false;
              }
              return true;
            });
  return hit;
}

double occupation_measure(const Path& path, const OccupationQuery& q) {
  require_event_path(path, "occupation_measure");
  if (!(q.t >= 0.0 && q.t <= path.horizon)) throw Error("OUT_OF_RANGE", "query time outside the path");
  if (q.whole_space) return q.t;
  double total = 0.0;
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const double a = path.points[i].t;
    if (a >= q.t) break;
    const double b = std::min(q.t, i + 1 < path.points.size() ? path.points[i + 1].t : path.horizon);
    const std::int64_t m = m_of(path, path.points[i].state);
    if (std::find(q.gamma.begin(), q.gamma.end(), m) != q.gamma.end()) total += b - a;
  }
  return total;
}

std::vector<double> windowed_m_histogram(const Path& path, double t_lo, double t_hi, std::int64_t n_max) {
  require_event_path(path, "windowed_m_histogram");
  if (!(t_lo >= 0.0 && t_lo < t_hi && t_hi <= path.horizon))
    throw Error("EMPTY_WINDOW", "need 0 <= t_lo < t_hi <= horizon");
  if (n_max < 0) throw Error("INVALID_ARGUMENT", "n_max must be non-negative");
  std::vector<double> hist(static_cast<std::size_t>(n_max) + 2, 0.0);
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const double a = std::max(t_lo, path.points[i].t);
    const double b = std::min(t_hi, i + 1 < path.points.size() ? path.points[i + 1].t : path.horizon);
    if (b <= a) continue;
    const std::int64_t m = m_of(path, path.points[i].state);
    hist[static_cast<std::size_t>(std::min(m, n_max + 1))] += b - a;
  }
  const double width = t_hi - t_lo;
  for (double& h : hist) h /= width;
  return hist;
}

}  // namespace storenet

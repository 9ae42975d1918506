#include "storenet/martingale.hpp"

#include "storenet/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace storenet {

double phi_c(const ModelParams& p, double c, double t) {
  const double q = c * std::exp(p.mu * t);
  return q * (rho(p) + q * p.xi / (2.0 * p.mu));
}

namespace {

double slots_used(const SystemState& w) { return static_cast<double>(occupied(w)); }

double checked_q(const ModelParams& p, double c, double t) {
  const double q = c * std::exp(p.mu * t);
  if (!(1.0 + q > 0.0)) throw Error("DOMAIN", "1 + c e^{mu t} must be positive");
  return q;
}

}  // namespace

double log_g_c(const ModelParams& p, std::int64_t N, double c, double t, const SystemState& w) {
  const double q = checked_q(p, c, t);
  return slots_used(w) * std::log1p(q) - static_cast<double>(N) * phi_c(p, c, t);
}

double psi(const ModelParams& p, std::int64_t N, double x, double z) {
  const double n = static_cast<double>(N);
  return std::pow(1.0 + x, z) * std::exp(-n * rho(p) * x - n * p.xi * x * x / (2.0 * p.mu));
}

double harmonic_residual(const ModelParams& p, std::int64_t N, double c, double t, const SystemState& w) {
  if (w.x1 < 1 || w.x2 < 0) throw Error("DOMAIN", "needs w1 >= 1 and w2 >= 0");
  const double q = checked_q(p, c, t);
  if (c == 0.0) return 0.0;

  // d/dt log g by central differences, refined once by Richardson.
  const double h = 1e-3 / p.mu;
  auto central = [&](double step) {
    return (log_g_c(p, N, c, t + step, w) - log_g_c(p, N, c, t - step, w)) / (2.0 * step);
  };
  const double dlog = (4.0 * central(0.5 * h) - central(h)) / 3.0;

  // Q g / g on the infinite-capacity chain, written in q = c e^{mu t}.
  const double n = static_cast<double>(N);
  const double s = 1.0 + q;
  const double qg = p.xi * n * q * (2.0 + q) + p.lambda * n * q - p.mu * slots_used(w) * q / s;
  return dlog + qg;
}

double poisson_charlier(int n, double a, double z) {
  if (n < 0) throw Error("INVALID_ARGUMENT", "n must be non-negative");
  // sum_k binom(n, k) (-a)^{n-k} (z)_k with (z)_k the falling factorial.
  double sum = 0.0;
  double falling = 1.0;
  double binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    sum += binom * std::pow(-a, n - k) * falling;
    falling *= z - k;
    binom = binom * (n - k) / (k + 1);
  }
  return sum;
}

double gaussian_factor_coefficient(int n, const ModelParams& p, std::int64_t N) {
  if (n < 0) throw Error("INVALID_ARGUMENT", "n must be non-negative");
  if (n % 2 == 1) return 0.0;
  const int k = n / 2;
  const double c = static_cast<double>(N) * p.xi / (2.0 * p.mu);
  double ratio = 1.0;  // (2k)! / k!
  for (int j = k + 1; j <= 2 * k; ++j) ratio *= j;
  return ratio * std::pow(-c, k);
}

double psi_coefficient(int n, const ModelParams& p, std::int64_t N, double z) {
  if (n < 0) throw Error("INVALID_ARGUMENT", "n must be non-negative");
  const double a = static_cast<double>(N) * rho(p);
  double sum = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k % 2 == 0) sum += binom * poisson_charlier(n - k, a, z) * gaussian_factor_coefficient(k, p, N);
    binom = binom * (n - k) / (k + 1);
  }
  return sum;
}

double quadratic_generator_residual(const ModelParams& p, std::int64_t N, double constant, const SystemState& w) {
  if (w.x1 < 1 || w.x2 < 0) throw Error("DOMAIN", "needs w1 >= 1 and w2 >= 0");
  const double n = static_cast<double>(N);
  const double k = slots_used(w);
  auto h = [&](double v) { return (v - n * rho(p)) * (v - n * rho(p)) - v - constant; };
  const double loss_rate = p.mu * static_cast<double>(w.x1) + 2.0 * p.mu * static_cast<double>(w.x2);
  return 2.0 * p.mu * h(k) + p.xi * n * (h(k + 2) - h(k)) + p.lambda * n * (h(k + 1) - h(k)) +
         loss_rate * (h(k - 1) - h(k));
}

MartingaleFunctional linear_martingale() {
  return {"exp(mu t)(v.X - N rho)", [](double t, const SystemState& s, std::int64_t N, const ModelParams& p) {
            return std::exp(p.mu * t) * (slots_used(s) - static_cast<double>(N) * rho(p));
          }};
}

MartingaleFunctional quadratic_martingale(double constant_factor) {
  std::ostringstream name;
  name << "exp(2 mu t)((v.X - N rho)^2 - v.X - " << constant_factor << " N xi/mu)";
  return {name.str(), [constant_factor](double t, const SystemState& s, std::int64_t N, const ModelParams& p) {
            const double n = static_cast<double>(N);
            const double d = slots_used(s) - n * rho(p);
            return std::exp(2.0 * p.mu * t) * (d * d - slots_used(s) - constant_factor * n * p.xi / p.mu);
          }};
}

MartingaleFunctional shifted_linear(double shift) {
  std::ostringstream name;
  name << "exp(mu t)(v.X - " << shift << " N rho)";
  return {name.str(), [shift](double t, const SystemState& s, std::int64_t N, const ModelParams& p) {
            return std::exp(p.mu * t) * (slots_used(s) - shift * static_cast<double>(N) * rho(p));
          }};
}

MartingaleFunctional exponential_martingale(double c) {
  std::ostringstream name;
  name << "g_c, c = " << c;
  return {name.str(), [c](double t, const SystemState& s, std::int64_t N, const ModelParams& p) {
            return std::exp(log_g_c(p, N, c, t, s));
          }};
}

DriftTestReport drift_test(const MartingaleFunctional& f, const ModelParams& p, std::int64_t N,
                           const SystemState& init, double horizon, int replicas, std::uint64_t seed,
                           const DriftTestOptions& opt) {
  if (replicas < 50) throw Error("INSUFFICIENT_REPLICAS", "drift_test needs at least 50 replicas");
  if (opt.grid_points < 2) throw Error("INVALID_ARGUMENT", "need at least two grid points");
  const ScaledParams scaled = ScaledParams::infinite_capacity(N);
  const double dt = horizon / (opt.grid_points - 1);
  const auto columns = static_cast<std::size_t>(opt.grid_points);

  auto values = map_replicas(
      static_cast<std::size_t>(replicas),
      [&](std::size_t r) {
        const Path path = simulate_path(p, scaled, init, horizon, seed, r, Recording::grid(dt));
        std::vector<double> v(columns);
        for (std::size_t k = 0; k < columns; ++k) v[k] = f.evaluate(path.points[k].t, path.points[k].state, N, p);
        return v;
      },
      opt.execution);

  DriftTestReport rep;
  rep.name = f.name;
  rep.k = opt.k;
  const double n = static_cast<double>(replicas);
  for (std::size_t k = 0; k < columns; ++k) {
    double mean = 0.0;
    bool finite = true;
    for (const auto& v : values) {
      finite = finite && std::isfinite(v[k]);
      mean += v[k];
    }
    mean /= n;
    double ss = 0.0;
    for (const auto& v : values) ss += (v[k] - mean) * (v[k] - mean);
    const double se = std::sqrt(ss / (n - 1.0) / n);
    if (!finite || !std::isfinite(mean) || !std::isfinite(se)) {
      rep.usable_until = k == 0 ? 0.0 : rep.t.back();
      break;
    }
    rep.t.push_back(static_cast<double>(k) * dt);
    rep.mean.push_back(mean);
    rep.std_error.push_back(se);
  }
  rep.pass = !rep.t.empty();
  for (std::size_t k = 0; k < rep.t.size(); ++k)
    if (std::abs(rep.mean[k] - rep.mean[0]) > opt.k * (rep.std_error[k] + rep.std_error[0])) rep.pass = false;
  return rep;
}

HittingMoments exp_hitting_identity(const ModelParams& p, const ScaledParams& scaled, Vec2 x0) {
  validate(p);
  if (classify_regime(p) != Regime::OverLoaded)
    throw Error("REQUIRES_OVERLOADED", "the hitting identities need rho > beta_bar");
  if (scaled.F_N.is_infinite()) throw Error("INFINITE_CAPACITY", "T1 needs finite F_N");
  const double n = static_cast<double>(scaled.N);
  const double cap = static_cast<double>(scaled.F_N.value()) / n;
  const double s0 = load(x0);
  if (!(s0 < cap)) throw Error("INIT_ON_BOUNDARY", "needs x1 + 2 x2 < F_N / N");
  const double r = rho(p);
  const double gap = p.lambda + 2.0 * p.xi;
  HittingMoments m;
  m.rhs1 = (gap - p.mu * s0) / (gap - p.mu * cap + p.mu / n);
  const double top = cap - 1.0 / n;
  m.rhs2 = (n * (s0 - r) * (s0 - r) - s0 - p.xi / p.mu) / (n * (top - r) * (top - r) - top - p.xi / p.mu);
  return m;
}

double limiting_scaled_variance(const ModelParams& p, Vec2 x0) {
  const double a = rho(p) - load(x0);
  const double b = rho(p) - p.beta_bar;
  const double r = p.xi / p.mu;
  return a * a * (p.beta_bar + r) / (b * b * b * b) - (load(x0) + r) / (b * b);
}

std::vector<std::optional<double>> sample_hitting_times(const ModelParams& p, const ScaledParams& scaled,
                                                        Vec2 x0, int replicas, std::uint64_t seed,
                                                        double max_horizon, Execution execution) {
  const SystemState init = state_from_scaled(x0, scaled.N);
  return map_replicas(
      static_cast<std::size_t>(replicas),
      [&](std::size_t r) { return first_saturation_time(p, scaled, init, max_horizon, seed, r); }, execution);
}

VarianceScalingReport variance_scaling_check(const ModelParams& p, Vec2 x0, const std::vector<std::int64_t>& N_list,
                                             int replicas, std::uint64_t seed) {
  if (replicas < 2) throw Error("INSUFFICIENT_REPLICAS", "need at least two replicas per N");
  if (N_list.empty()) throw Error("INVALID_ARGUMENT", "N_list is empty");
  VarianceScalingReport rep;
  rep.reference = limiting_scaled_variance(p, x0);
  const double max_horizon = 50.0 * (hitting_time_T0(p, x0) + 1.0 / p.mu);
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    const ScaledParams scaled = ScaledParams::from_beta(p, N_list[i]);
    const auto times = sample_hitting_times(p, scaled, x0, replicas, seed + i, max_horizon);
    std::vector<double> e;
    for (const auto& t : times)
      if (t) e.push_back(std::exp(p.mu * *t));
    VarianceRow row{N_list[i], static_cast<int>(e.size()), 0.0, 0.0, 0.0};
    for (double v : e) row.mean += v;
    row.mean /= static_cast<double>(e.size());
    for (double v : e) row.variance += (v - row.mean) * (v - row.mean);
    row.variance /= static_cast<double>(e.size() - 1);
    row.scaled_variance = static_cast<double>(row.N) * row.variance;
    rep.rows.push_back(row);
  }
  double lo = rep.rows.front().scaled_variance, hi = lo;
  bool all_hit = true;
  for (const auto& r : rep.rows) {
    lo = std::min(lo, r.scaled_variance);
    hi = std::max(hi, r.scaled_variance);
    all_hit = all_hit && r.hits == replicas;
  }
  rep.spread = lo > 0.0 ? hi / lo : INFINITY;
  rep.pass = all_hit && rep.spread < 5.0;
  return rep;
}

CompensatedMartingales compensated_martingales(const Path& path, const ModelParams& p, double t_end) {
  if (path.recording.mode != Recording::Mode::Events)
    throw Error("NEEDS_EVENT_PATH", "compensated_martingales needs an event-mode path");
  if (!(t_end >= 0.0 && t_end <= path.horizon)) throw Error("OUT_OF_RANGE", "t_end outside the path");
  const SystemState& s0 = path.points.front().state;

  CompensatedMartingales out;
  double comp1 = 0.0, comp2 = 0.0;  // integrated drifts
  auto track = [&](const SystemState& s) {
    const double m1 = static_cast<double>(s.x1 - s0.x1) - comp1;
    const double m2 = static_cast<double>(s.x2 - s0.x2) - comp2;
    out.sup_abs_m1 = std::max(out.sup_abs_m1, std::abs(m1));
    out.sup_abs_m2 = std::max(out.sup_abs_m2, std::abs(m2));
  };

  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const PathPoint& pt = path.points[i];
    if (pt.t > t_end) break;
    if (i > 0) {
      const TransitionKind k = pt.kind;
      if (k != TransitionKind::Admission) out.quadratic1 += 1.0;
      if (k != TransitionKind::SingleLoss) out.quadratic2 += 1.0;
    }
    track(pt.state);
    const double end = std::min(t_end, i + 1 < path.points.size() ? path.points[i + 1].t : path.horizon);
    const double dt = end - pt.t;
    const RateTable r = transition_rates(pt.state, p, path.scaled);
    const double x1 = static_cast<double>(pt.state.x1);
    const double x2 = static_cast<double>(pt.state.x2);
    const double adm = r.rate[0], dup = r.rate[1];
    comp1 += dt * (-p.mu * x1 + 2.0 * p.mu * x2 - dup);
    comp2 += dt * (-2.0 * p.mu * x2 + adm + dup);
    out.bracket1 += dt * (2.0 * p.mu * x2 + p.mu * x1 + dup);
    out.bracket2 += dt * (adm + 2.0 * p.mu * x2 + dup);
    track(pt.state);  // just before the next jump
  }
  return out;
}

}  // namespace storenet

#include "storenet/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "storenet/fast_chain.hpp"
#include "storenet/skorokhod.hpp"

namespace storenet {

namespace {

// min over s in [s_lo, s_hi] of c + a s + b s^2; every x1 component here
// has that form in s = exp(-mu t).
double min_quadratic(double c, double a, double b, double s_lo, double s_hi) {
  auto f = [&](double s) { return c + a * s + b * s * s; };
  double m = std::min(f(s_lo), f(s_hi));
  if (b > 0.0) {
    const double s = -a / (2.0 * b);
    if (s > s_lo && s < s_hi) m = std::min(m, f(s));
  }
  return m;
}

struct BoundaryCoefficients {
  double c1, a1, b1;  // x1 = c1 + a1 s + b1 s^2
  double c2, d2;      // x2 = c2 + d2 s^2
};

BoundaryCoefficients boundary_coefficients(const ModelParams& p, double pi0, Vec2 y0) {
  const double a = -p.lambda * (1.0 - pi0);
  const double b2 = 0.5 * p.mu * p.beta_bar + 0.5 * p.lambda * (1.0 - pi0);
  const double c2 = b2 / (2.0 * p.mu);
  const double d2 = y0.x2 - c2;
  const double c1 = (a + 2.0 * p.mu * c2) / p.mu;
  return {c1, y0.x1 - c1 + 2.0 * d2, -2.0 * d2, c2, d2};
}

}  // namespace

Vec2 interior_solution(const ModelParams& p, Vec2 x0, double t) {
  const double e1 = std::exp(-p.mu * t);
  const double e2 = e1 * e1;
  const double x1 = (load(x0) - rho(p)) * e1 - (2.0 * x0.x2 - (p.lambda + p.xi) / p.mu) * e2 + p.xi / p.mu;
  const double mid = (p.lambda + p.xi) / (2.0 * p.mu);
  return {x1, mid + (x0.x2 - mid) * e2};
}

double hitting_time_T0(const ModelParams& p, Vec2 x0) {
  validate(p);
  if (classify_regime(p) != Regime::OverLoaded)
    throw Error("REQUIRES_OVERLOADED", "T0 exists only when rho > beta_bar");
  if (!in_domain_S(x0, p.beta_bar, face_tolerance(p.beta_bar)))
    throw Error("INIT_OUTSIDE_S", "x0 is not in S");
  const double gap = p.lambda + 2.0 * p.xi;
  return std::log((gap - p.mu * load(x0)) / (gap - p.mu * p.beta_bar)) / p.mu;
}

Vec2 boundary_drift(const ModelParams& p, double pi0, Vec2 y) {
  const double served = p.lambda * (1.0 - pi0);
  return {-served + p.mu * (2.0 * y.x2 - y.x1),
          0.5 * p.mu * p.beta_bar + 0.5 * served - 2.0 * p.mu * y.x2};
}

Vec2 boundary_solution(const ModelParams& p, double pi0, Vec2 y0, double t) {
  if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw Error("INVALID_ARGUMENT", "pi0 must lie in [0, 1]");
  if (std::abs(load(y0) - p.beta_bar) > face_tolerance(p.beta_bar)) {
    std::ostringstream os;
    os << "x1 + 2 x2 = " << load(y0) << " differs from beta_bar = " << p.beta_bar;
    throw Error("OFF_BOUNDARY", os.str());
  }
  // The system is triangular with eigenvalues -mu and -2mu, never equal.
  const BoundaryCoefficients k = boundary_coefficients(p, pi0, y0);
  const double s = std::exp(-p.mu * t);
  return {k.c1 + k.a1 * s + k.b1 * s * s, k.c2 + k.d2 * s * s};
}

Vec2 boundary_fixed_point(const ModelParams& p, double pi0) {
  const double b2 = 0.5 * p.mu * p.beta_bar + 0.5 * p.lambda * (1.0 - pi0);
  const double x2 = b2 / (2.0 * p.mu);
  return {(-p.lambda * (1.0 - pi0) + 2.0 * p.mu * x2) / p.mu, x2};
}

FluidTrajectory fluid_trajectory(const ModelParams& p, Vec2 x0, double horizon, double dt, double regime_tol) {
  validate(p);
  if (!(dt > 0.0 && horizon >= 0.0)) throw Error("INVALID_ARGUMENT", "need dt > 0 and horizon >= 0");
  const double tol = face_tolerance(p.beta_bar);
  if (!in_domain_S(x0, p.beta_bar, tol)) throw Error("INIT_OUTSIDE_S", "x0 is not in S");

  FluidTrajectory traj;
  traj.regime = classify_regime(p, regime_tol);
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  auto grid = [&](std::size_t k) { return static_cast<double>(k) * dt; };
  auto on_face = [&](Vec2 x) { return std::abs(load(x) - p.beta_bar) <= tol; };

  const bool starts_on_face = on_face(x0);
  const bool overloaded = traj.regime == Regime::OverLoaded;
  std::optional<double> contact;
  if (starts_on_face) contact = 0.0;
  else if (overloaded) contact = hitting_time_T0(p, x0);
  const double interior_end = std::min(horizon, (overloaded && contact) ? *contact : horizon);

  // x1 of the closed form, in s = exp(-mu t): c + a s + b s^2.
  const double ca = p.xi / p.mu;
  const double aa = load(x0) - rho(p);
  const double ba = -(2.0 * x0.x2 - (p.lambda + p.xi) / p.mu);
  const bool interior_ok = min_quadratic(ca, aa, ba, std::exp(-p.mu * interior_end), 1.0) >= -tol;

  if (!interior_ok) {
    traj.numeric = true;
    MeasureWeights weights = zero_weights();
    if (overloaded) {
      const PiHeads h = pi_heads(p);
      weights = stationary_on_capacity_face(h.pi0, h.pi1, p.beta_bar, tol);
    }
    const ReflectedSolution sol = solve_2d(SkorokhodData::from_model(p, weights), x0, horizon, dt);
    traj.unspecified_corner = sol.corner_stall;
    for (std::size_t k = 0; k < sol.t.size(); ++k) {
      const bool face = on_face(sol.z[k]);
      if (face && !traj.contact_time) traj.contact_time = sol.t[k];
      traj.points.push_back({sol.t[k], sol.z[k].x1, sol.z[k].x2, face});
    }
    return traj;
  }

  if (contact && *contact <= horizon) traj.contact_time = contact;
  const bool use_boundary = overloaded && traj.contact_time.has_value();
  double pi0 = 0.0;
  Vec2 y0{};
  if (use_boundary) {
    pi0 = pi_heads(p).pi0;
    y0 = starts_on_face ? x0 : interior_solution(p, x0, *traj.contact_time);
    // Remove the rounding drift of the closed form before starting on the face.
    y0.x1 = p.beta_bar - 2.0 * y0.x2;
    const BoundaryCoefficients k = boundary_coefficients(p, pi0, y0);
    const double tail = horizon - *traj.contact_time;
    if (min_quadratic(k.c1, k.a1, k.b1, std::exp(-p.mu * tail), 1.0) < -tol) traj.unspecified_corner = true;
  }

  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = grid(k);
    Vec2 x;
    if (use_boundary && t >= *traj.contact_time) {
      x = boundary_solution(p, pi0, y0, t - *traj.contact_time);
      if (x.x1 < -tol) break;  // capacity-face solution is unspecified beyond x1 = 0
    } else {
      x = interior_solution(p, x0, t);
    }
    traj.points.push_back({t, x.x1, x.x2, on_face(x)});
  }
  return traj;
}

double sup_distance(const FluidTrajectory& fluid, const std::vector<Vec2>& samples) {
  if (samples.size() != fluid.points.size())
    throw Error("INVALID_ARGUMENT", "sample grid does not match the trajectory grid");
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    d = std::max(d, std::abs(samples[k].x1 - fluid.points[k].x1));
    d = std::max(d, std::abs(samples[k].x2 - fluid.points[k].x2));
  }
  return d;
}

}  // namespace storenet

#include "storenet/skorokhod.hpp"

#include <algorithm>
#include <cmath>

namespace storenet {

MeasureWeights zero_weights() {
  return [](double, Vec2) { return NuMasses{}; };
}

MeasureWeights stationary_on_capacity_face(double pi0, double pi1, double beta_bar, double tol) {
  return [=](double, Vec2 z) {
    if (std::abs(load(z) - beta_bar) <= tol) return NuMasses{pi0, pi0 + pi1};
    return NuMasses{};
  };
}

SkorokhodData SkorokhodData::from_model(const ModelParams& p, MeasureWeights weights) {
  return {{-p.lambda, p.xi + p.lambda},
          {-p.mu, 2.0 * p.mu, 0.0, -2.0 * p.mu},
          {p.lambda, p.lambda, -p.lambda, -p.lambda},
          p.beta_bar,
          p.lambda,
          p.xi,
          std::move(weights)};
}

double face_tolerance(double beta_bar) { return 1e-9 * std::max(1.0, beta_bar); }

ReflectedSolution solve_2d(const SkorokhodData& d, Vec2 z0, double horizon, double dt) {
  if (!(dt > 0.0 && horizon >= 0.0)) throw Error("INVALID_ARGUMENT", "need dt > 0 and horizon >= 0");
  const double tol = face_tolerance(d.beta_bar);
  if (!in_domain_S(z0, d.beta_bar, tol)) throw Error("INIT_OUTSIDE_S", "z0 is not in S");
  // A push along column 1 must raise z1, a push along column 2 must lower v.z.
  const Vec2 c1 = d.R.col1();
  const Vec2 c2 = d.R.col2();
  if (!(c1.x1 > 0.0 && load(c2) < 0.0))
    throw Error("INVALID_DATA", "reflection columns cannot restore feasibility");

  ReflectedSolution sol;
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  sol.t.reserve(steps + 1);
  sol.z.reserve(steps + 1);
  sol.y.reserve(steps + 1);
  Vec2 z = z0;
  Vec2 y{};
  sol.t.push_back(0.0);
  sol.z.push_back(z);
  sol.y.push_back(y);

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const NuMasses nu = d.weights(t, z);
    const double exchange = z.x1 > tol ? d.exchange_rate * nu.zero : 0.0;
    const Vec2 forcing{exchange, -d.blocking_rate * nu.zero_or_one - exchange};
    Vec2 next = z + dt * (d.theta + d.A * z + forcing);

    double dy1 = 0.0;
    if (next.x1 < 0.0) {
      dy1 = -next.x1 / c1.x1;
      next = next + dy1 * c1;
      next.x1 = 0.0;
    }
    double dy2 = 0.0;
    const double excess = load(next) - d.beta_bar;
    if (excess > 0.0) {
      if (next.x1 <= tol) {
        sol.corner_stall = true;
        break;
      }
      dy2 = excess / -load(c2);
      next = next + dy2 * c2;
    }
    z = next;
    y = y + Vec2{dy1, dy2};
    if (dy1 > 0.0 && z.x1 > tol) sol.residual_face1 += dy1;
    if (dy2 > 0.0 && !(z.x1 > tol && std::abs(load(z) - d.beta_bar) <= tol)) sol.residual_face2 += dy2;
    sol.t.push_back(static_cast<double>(k + 1) * dt);
    sol.z.push_back(z);
    sol.y.push_back(y);
  }
  return sol;
}

Reflection1D reflect_1d(std::span<const double> v) {
  if (v.empty()) return {};
  if (v.front() < 0.0) throw Error("INIT_OUTSIDE_S", "v(0) must be non-negative");
  Reflection1D r;
  r.z.resize(v.size());
  r.y.resize(v.size());
  double running = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    running = std::max(running, -v[i]);
    r.y[i] = running;
    r.z[i] = v[i] + running;
  }
  return r;
}

}  // namespace storenet

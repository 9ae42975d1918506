#pragma once

#include <optional>
#include <vector>

#include "storenet/model.hpp"

namespace storenet {

/// Closed-form solution of the unconstrained fluid ODE
///   x1' = -lambda - mu x1 + 2 mu x2,   x2' = lambda + xi - 2 mu x2.
Vec2 interior_solution(const ModelParams& params, Vec2 x0, double t);

/// Time at which the interior solution started at x0 reaches
/// x1 + 2 x2 = beta_bar. Needs rho > beta_bar and x0 in S.
double hitting_time_T0(const ModelParams& params, Vec2 x0);

/// Right-hand side of the capacity-face ODE
///   x1' = -lambda (1 - pi0) + mu (2 x2 - x1)
///   x2' = mu beta_bar / 2 + lambda (1 - pi0) / 2 - 2 mu x2.
Vec2 boundary_drift(const ModelParams& params, double pi0, Vec2 y);

/// Closed-form solution of the capacity-face ODE started at y0, which must
/// satisfy x1 + 2 x2 = beta_bar (Error("OFF_BOUNDARY") otherwise).
Vec2 boundary_solution(const ModelParams& params, double pi0, Vec2 y0, double t);

/// Stationary point of boundary_drift.
Vec2 boundary_fixed_point(const ModelParams& params, double pi0);

struct FluidPoint {
  double t;
  double x1;
  double x2;
  bool on_boundary2;
};

struct FluidTrajectory {
  std::vector<FluidPoint> points;
  std::optional<double> contact_time;  // first time on x1 + 2 x2 = beta_bar
  Regime regime = Regime::UnderLoaded;
  bool numeric = false;                // x1 reached 0; reflection solved numerically
  bool unspecified_corner = false;     // capacity-face solution reached x1 = 0
};

/// Interior closed form up to contact, then (overloaded regime only) the
/// capacity-face solution with pi(0) from the fast chain. Falls back to the
/// numeric reflection solver when the closed form would leave x1 >= 0.
FluidTrajectory fluid_trajectory(const ModelParams& params, Vec2 x0, double horizon, double dt,
                                 double regime_tol = 0.0);

/// Sup over the grid of max(|dx1|, |dx2|) between a trajectory and samples.
double sup_distance(const FluidTrajectory& fluid, const std::vector<Vec2>& samples);

}  // namespace storenet

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "storenet/model.hpp"

namespace storenet {

struct Mat2 {
  double a11, a12, a21, a22;

  Vec2 operator*(Vec2 v) const { return {a11 * v.x1 + a12 * v.x2, a21 * v.x1 + a22 * v.x2}; }
  Vec2 col1() const { return {a11, a21}; }
  Vec2 col2() const { return {a12, a22}; }
};

/// Masses the limiting occupation measure puts on {0} and {0, 1} at time t.
struct NuMasses {
  double zero = 0.0;
  double zero_or_one = 0.0;
};

/// Caller-supplied occupation weights, as a function of time and position.
using MeasureWeights = std::function<NuMasses(double t, Vec2 z)>;

MeasureWeights zero_weights();

/// pi-masses whenever z sits on the capacity face (within tol), zero elsewhere.
MeasureWeights stationary_on_capacity_face(double pi0, double pi1, double beta_bar, double tol);

/// Data of the reflection problem in S with oblique directions R.
struct SkorokhodData {
  Vec2 theta;
  Mat2 A;
  Mat2 R;
  double beta_bar;
  double exchange_rate;   // coefficient of nu({0}) in the x1/x2 exchange (lambda)
  double blocking_rate;   // coefficient of nu({0,1}) in the x2 equation (xi)
  MeasureWeights weights;

  /// theta = (-lambda, xi + lambda), A = ((-mu, 2mu), (0, -2mu)),
  /// R = ((lambda, lambda), (-lambda, -lambda)).
  static SkorokhodData from_model(const ModelParams& params, MeasureWeights weights);
};

/// Sampled solution (z, y) on the grid t_k = k dt.
struct ReflectedSolution {
  std::vector<double> t;
  std::vector<Vec2> z;
  std::vector<Vec2> y;
  bool corner_stall = false;        // stopped at the corner (0, beta_bar/2)
  double residual_face1 = 0.0;      // y1 increments made while z1 > tol
  double residual_face2 = 0.0;      // y2 increments made off {z1 > 0, v.z = beta_bar}
};

/// Explicit Euler predictor followed by a projection along the columns of
/// R: the x1 = 0 face is corrected first, then the capacity face.
/// Throws Error("INVALID_DATA") if the reflection columns cannot restore
/// feasibility with non-negative pushes.
ReflectedSolution solve_2d(const SkorokhodData& data, Vec2 z0, double horizon, double dt);

/// Face-activity tolerance used for complementarity bookkeeping.
double face_tolerance(double beta_bar);

struct Reflection1D {
  std::vector<double> z;
  std::vector<double> y;
};

/// One-dimensional reflection at 0: y(t) = sup_{s<=t} max(0, -v(s)), z = v + y.
Reflection1D reflect_1d(std::span<const double> v);

}  // namespace storenet

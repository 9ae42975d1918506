#pragma once

// Property checks for reflection maps, shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "storenet/rng.hpp"
#include "storenet/skorokhod.hpp"

namespace checks {

/// Random-walk sample path of n points with v(0) >= 0.
inline std::vector<double> random_walk(storenet::Stream& rng, std::size_t n) {
  std::vector<double> v(n);
  v[0] = rng.uniform();
  const double scale = 0.05 + rng.uniform();
  const double drift = (rng.uniform() - 0.6) * 0.2;
  for (std::size_t i = 1; i < n; ++i) v[i] = v[i - 1] + drift + scale * (rng.uniform() - 0.5);
  return v;
}

/// Complementarity and minimality of the 1D map on one sampled path. Returns
/// an empty string on success, otherwise the first violated property.
inline std::string check_reflection_1d(const std::vector<double>& v, storenet::Stream& rng) {
  const auto r = storenet::reflect_1d(v);
  if (r.y.front() != 0.0) return "y(0) != 0";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (r.z[i] < 0.0) return "z < 0";
    if (r.z[i] != v[i] + r.y[i]) return "z != v + y";
    if (i > 0 && r.y[i] < r.y[i - 1]) return "y decreasing";
    if (i > 0 && r.y[i] > r.y[i - 1] && r.z[i] != 0.0) return "y increased off the face";
  }
  const auto brute = oracle::minimal_regulator(v);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(brute[i] - r.y[i]) > 1e-12) return "differs from brute-force regulator";

  // Lowering any regulator value breaks feasibility or monotonicity.
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (r.y[i] == 0.0) continue;
    const double lowered = r.y[i] - 1e-9 * std::max(1.0, r.y[i]);
    const bool feasible = v[i] + lowered >= 0.0;
    const bool monotone = i == 0 || lowered >= r.y[i - 1];
    if (feasible && monotone) return "regulator not minimal";
  }
  // Random feasible non-decreasing candidates dominate y.
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> cand(v.size());
    double run = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      run = std::max(run, std::max(0.0, r.y[i] + (rng.uniform() - 0.7) * 0.5));
      cand[i] = run;
    }
    bool feasible = true;
    for (std::size_t i = 0; i < v.size() && feasible; ++i) feasible = v[i] + cand[i] >= 0.0;
    if (!feasible) continue;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (cand[i] < r.y[i]) return "feasible candidate below y";
  }
  return {};
}

/// z in S, monotone regulators from 0, and zero complementarity residuals.
inline std::string check_reflected_2d(const storenet::ReflectedSolution& s, double beta_bar) {
  const double tol = storenet::face_tolerance(beta_bar);
  if (s.y.empty() || s.y.front().x1 != 0.0 || s.y.front().x2 != 0.0) return "y(0) != 0";
  for (std::size_t k = 0; k < s.z.size(); ++k) {
    if (!storenet::in_domain_S(s.z[k], beta_bar, tol)) return "z left S";
    if (k > 0 && (s.y[k].x1 < s.y[k - 1].x1 || s.y[k].x2 < s.y[k - 1].x2)) return "regulator decreased";
  }
  if (s.residual_face1 != 0.0) return "face-1 complementarity residual";
  if (s.residual_face2 != 0.0) return "face-2 complementarity residual";
  return {};
}

}  // namespace checks

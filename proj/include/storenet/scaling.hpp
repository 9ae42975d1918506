#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "storenet/ctmc.hpp"
#include "storenet/model.hpp"

namespace storenet {

/// Diffusion-scale fluctuations sampled every dt.
///   under-loaded:  Z = (X1 + 2 X2 - N rho) / sqrt(N)
///   critical:      Z1 = sqrt(N)(rho1 - X1/N), Z2 = sqrt(N)(rho2 - X2/N),
///                  Z = Z1 + 2 Z2 = sqrt(N)(rho - (X1 + 2 X2)/N)
/// with rho1 = xi/mu and rho2 = (lambda + xi)/(2 mu).
struct CenteredPath {
  std::vector<double> t;
  std::vector<double> z;
  std::vector<double> z1;  // critical regime only
  std::vector<double> z2;  // critical regime only
  std::int64_t N = 0;
  Regime regime = Regime::UnderLoaded;
  double dt = 0.0;
  double floor = 0.0;      // critical regime: sqrt(N)(rho - F_N/N), rho = beta_bar
};

CenteredPath centered_underloaded(const Path& path, const ModelParams& params, std::int64_t N, double dt,
                                  double regime_tol = 0.0);
CenteredPath centered_critical(const Path& path, const ModelParams& params, std::int64_t N, double dt,
                               double regime_tol = 0.0);

struct StationaryMoments {
  double mean = 0.0;
  double variance = 0.0;  // time average of Z^2 minus mean^2
  std::size_t samples = 0;
};

StationaryMoments stationary_moments(const CenteredPath& cpath, double burn_in);

/// Sample autocorrelation of Z at the given lag (a multiple of dt).
double autocorrelation(const CenteredPath& cpath, double lag, double burn_in);

/// Increment regression E[dZ | Z]/lag = a + b Z, Var[dZ | Z]/(2 lag) = D.
struct DriftDiffusionFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
  double diffusion = 0.0;
  double diffusion_se = 0.0;
  std::size_t samples = 0;
};

/// Uses increments starting after burn_in with Z > interior_min. In the
/// critical regime pass interior_min = 3/sqrt(N) to stay off the reflection.
DriftDiffusionFit empirical_drift_diffusion(const CenteredPath& cpath, double lag, double burn_in = 0.0,
                                            double interior_min = -INFINITY);

/// Least-squares drift rows for (Z1, Z2) in the critical regime:
/// E[dZi]/lag = c0 + c1 Z1 + c2 Z2. Two candidate rows for Z2 are scored by
/// mean squared residual: -2 mu Z1 and -2 mu Z2.
struct DriftMatrixFit {
  std::array<double, 3> row1{};
  std::array<double, 3> row2{};
  double mse_z2_uses_z1 = 0.0;
  double mse_z2_uses_z2 = 0.0;
  std::string better_variant;
  std::size_t samples = 0;
};

DriftMatrixFit fit_drift_matrix(const CenteredPath& cpath, const ModelParams& params, double lag, double burn_in,
                                double interior_min);

}  // namespace storenet

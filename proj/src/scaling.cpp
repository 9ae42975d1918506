#include "storenet/scaling.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace storenet {

namespace {

std::size_t grid_size(const Path& path, double dt) {
  if (!(dt > 0.0)) throw Error("INVALID_ARGUMENT", "dt must be positive");
  return static_cast<std::size_t>(std::floor(path.horizon / dt + 1e-9)) + 1;
}

std::size_t stride_of(const CenteredPath& c, double lag) {
  const auto s = static_cast<std::size_t>(std::llround(lag / c.dt));
  if (s == 0 || std::abs(static_cast<double>(s) * c.dt - lag) > 1e-9 * lag)
    throw Error("INVALID_ARGUMENT", "lag must be a positive multiple of the grid spacing");
  return s;
}

std::size_t first_index(const CenteredPath& c, double burn_in) {
  return static_cast<std::size_t>(std::ceil(burn_in / c.dt - 1e-9));
}

}  // namespace

CenteredPath centered_underloaded(const Path& path, const ModelParams& p, std::int64_t N, double dt, double tol) {
  if (classify_regime(p, tol) != Regime::UnderLoaded)
    throw Error("REGIME_MISMATCH", "centered_underloaded needs rho < beta_bar");
  CenteredPath c;
  c.N = N;
  c.regime = Regime::UnderLoaded;
  c.dt = dt;
  const double n = static_cast<double>(N);
  const double root = std::sqrt(n);
  const std::size_t K = grid_size(path, dt);
  for (std::size_t k = 0; k < K; ++k) {
    const double t = static_cast<double>(k) * dt;
    const SystemState& s = path.state_at(std::min(t, path.horizon));
    c.t.push_back(t);
    c.z.push_back((static_cast<double>(occupied(s)) - n * rho(p)) / root);
  }
  return c;
}

CenteredPath centered_critical(const Path& path, const ModelParams& p, std::int64_t N, double dt, double tol) {
  if (classify_regime(p, tol) != Regime::Critical)
    throw Error("REGIME_MISMATCH", "centered_critical needs rho = beta_bar");
  CenteredPath c;
  c.N = N;
  c.regime = Regime::Critical;
  c.dt = dt;
  const double n = static_cast<double>(N);
  const double root = std::sqrt(n);
  const double rho1 = p.xi / p.mu;
  const double rho2 = (p.lambda + p.xi) / (2.0 * p.mu);
  // With finite capacity Z is assembled as ((N rho - F_N) + m)/sqrt(N), so
  // m >= 0 gives Z >= floor without rounding slack.
  const bool finite = !path.scaled.F_N.is_infinite();
  const double offset = finite ? n * rho(p) - static_cast<double>(path.scaled.F_N.value()) : 0.0;
  c.floor = finite ? offset / root : -INFINITY;
  const std::size_t K = grid_size(path, dt);
  for (std::size_t k = 0; k < K; ++k) {
    const double t = static_cast<double>(k) * dt;
    const SystemState& s = path.state_at(std::min(t, path.horizon));
    c.t.push_back(t);
    c.z1.push_back((n * rho1 - static_cast<double>(s.x1)) / root);
    c.z2.push_back((n * rho2 - static_cast<double>(s.x2)) / root);
    if (finite)
      c.z.push_back((offset + static_cast<double>(path.scaled.F_N.value() - occupied(s))) / root);
    else
      c.z.push_back((n * rho(p) - static_cast<double>(occupied(s))) / root);
  }
  return c;
}

StationaryMoments stationary_moments(const CenteredPath& c, double burn_in) {
  StationaryMoments m;
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = first_index(c, burn_in); k < c.z.size(); ++k) {
    s1 += c.z[k];
    s2 += c.z[k] * c.z[k];
    ++m.samples;
  }
  if (m.samples < 2) throw Error("INSUFFICIENT_SAMPLES", "no samples after burn-in");
  const double n = static_cast<double>(m.samples);
  m.mean = s1 / n;
  m.variance = s2 / n - m.mean * m.mean;
  return m;
}

double autocorrelation(const CenteredPath& c, double lag, double burn_in) {
  const std::size_t s = stride_of(c, lag);
  const std::size_t k0 = first_index(c, burn_in);
  if (k0 + s + 2 > c.z.size()) throw Error("INSUFFICIENT_SAMPLES", "series too short for this lag");
  const StationaryMoments m = stationary_moments(c, burn_in);
  double cov = 0.0;
  std::size_t pairs = 0;
  for (std::size_t k = k0; k + s < c.z.size(); ++k, ++pairs) cov += (c.z[k] - m.mean) * (c.z[k + s] - m.mean);
  return cov / static_cast<double>(pairs) / m.variance;
}

DriftDiffusionFit empirical_drift_diffusion(const CenteredPath& c, double lag, double burn_in, double interior_min) {
  const std::size_t s = stride_of(c, lag);
  std::vector<double> x, y;
  for (std::size_t k = first_index(c, burn_in); k + s < c.z.size(); ++k) {
    if (!(c.z[k] > interior_min)) continue;
    x.push_back(c.z[k]);
    y.push_back((c.z[k + s] - c.z[k]) / lag);
  }
  if (x.size() < 10) throw Error("INSUFFICIENT_SAMPLES", "fewer than 10 interior increments");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  DriftDiffusionFit f;
  f.samples = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;

  // Squared residual increments estimate 2 D lag.
  double r2 = 0.0, r4 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (y[i] - f.intercept - f.slope * x[i]) * lag;
    r2 += r * r;
    r4 += r * r * r * r;
  }
  const double mean_r2 = r2 / n;
  f.slope_se = std::sqrt(mean_r2 / (lag * lag) / sxx);
  f.diffusion = mean_r2 / (2.0 * lag);
  f.diffusion_se = std::sqrt(std::max(0.0, r4 / n - mean_r2 * mean_r2) / n) / (2.0 * lag);
  return f;
}

DriftMatrixFit fit_drift_matrix(const CenteredPath& c, const ModelParams& p, double lag, double burn_in,
                                double interior_min) {
  if (c.regime != Regime::Critical) throw Error("REGIME_MISMATCH", "drift matrix fit needs a critical path");
  const std::size_t s = stride_of(c, lag);
  std::vector<std::size_t> idx;
  for (std::size_t k = first_index(c, burn_in); k + s < c.z.size(); ++k)
    if (c.z[k] > interior_min) idx.push_back(k);
  if (idx.size() < 10) throw Error("INSUFFICIENT_SAMPLES", "fewer than 10 interior increments");

  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd d1(n), d2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t k = idx[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    X(i, 1) = c.z1[k];
    X(i, 2) = c.z2[k];
    d1(i) = (c.z1[k + s] - c.z1[k]) / lag;
    d2(i) = (c.z2[k + s] - c.z2[k]) / lag;
  }
  const auto qr = X.colPivHouseholderQr();
  const Eigen::Vector3d b1 = qr.solve(d1);
  const Eigen::Vector3d b2 = qr.solve(d2);

  DriftMatrixFit f;
  f.samples = idx.size();
  f.row1 = {b1(0), b1(1), b1(2)};
  f.row2 = {b2(0), b2(1), b2(2)};
  const Eigen::VectorXd via_z1 = -2.0 * p.mu * X.col(1);
  const Eigen::VectorXd via_z2 = -2.0 * p.mu * X.col(2);
  f.mse_z2_uses_z1 = (d2 - via_z1).squaredNorm() / static_cast<double>(n);
  f.mse_z2_uses_z2 = (d2 - via_z2).squaredNorm() / static_cast<double>(n);
  f.better_variant = f.mse_z2_uses_z2 <= f.mse_z2_uses_z1 ? "-2 mu z2" : "-2 mu z1";
  return f;
}

}  // namespace storenet

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "storenet/ctmc.hpp"
#include "storenet/model.hpp"
#include "storenet/replicas.hpp"

namespace storenet {

// ---------------------------------------------------------------------------
// Exponential space-time harmonic functions of the infinite-capacity chain.
//
// With v.w = w1 + 2 w2 and phi_c(t) = c e^{mu t} (rho + c xi e^{mu t} / (2 mu)),
// g_c(t, w) = (1 + c e^{mu t})^{v.w} exp(-N phi_c(t)) satisfies
// dg/dt + Q g = 0 on w1 >= 1. Expanding in x = c e^{mu t} gives a family of
// polynomial martingales e^{n mu t} Psi_n(v.X(t)).
// ---------------------------------------------------------------------------

/// phi_c(t), per server (the exponent of g_c is N phi_c(t)).
double phi_c(const ModelParams& params, double c, double t);

/// log g_c(t, w). Needs 1 + c e^{mu t} > 0.
double log_g_c(const ModelParams& params, std::int64_t N, double c, double t, const SystemState& w);

/// Psi(x, z) = (1 + x)^z exp(-N rho x - N xi x^2 / (2 mu)).
double psi(const ModelParams& params, std::int64_t N, double x, double z);

/// (dg_c/dt + Q g_c)(t, w) / |g_c(t, w)| with F_N = infinite; the time
/// derivative is a Richardson-refined central difference, Q is exact.
/// Error("DOMAIN") unless w1 >= 1 and 1 + c e^{mu t} > 0.
double harmonic_residual(const ModelParams& params, std::int64_t N, double c, double t, const SystemState& w);

/// n-th Poisson-Charlier polynomial: e^{-a x} (1 + x)^z = sum_n C_n^a(z) x^n / n!.
double poisson_charlier(int n, double a, double z);

/// Coefficient of x^n / n! in Psi(x, z).
double psi_coefficient(int n, const ModelParams& params, std::int64_t N, double z);

/// Even coefficients b_{2k} = (2k)!/k! (-N xi / (2 mu))^k of exp(-N xi x^2 / (2 mu))
/// in the x^n/n! basis; odd ones vanish.
double gaussian_factor_coefficient(int n, const ModelParams& params, std::int64_t N);

/// (d/dt + Q) applied exactly to e^{2 mu t}((v.w - N rho)^2 - v.w - C),
/// divided by e^{2 mu t}. Vanishes identically only for C = N xi / mu.
double quadratic_generator_residual(const ModelParams& params, std::int64_t N, double constant,
                                    const SystemState& w);

// ---------------------------------------------------------------------------
// Monte Carlo constancy tests.
// ---------------------------------------------------------------------------

struct MartingaleFunctional {
  std::string name;
  std::function<double(double t, const SystemState& state, std::int64_t N, const ModelParams& params)> evaluate;
};

/// e^{mu t} (v.X - N rho).
MartingaleFunctional linear_martingale();
/// e^{2 mu t} ((v.X - N rho)^2 - v.X - constant_factor * N xi / mu).
MartingaleFunctional quadratic_martingale(double constant_factor = 1.0);
/// e^{mu t} (v.X - shift * N rho); not a martingale for shift != 1.
MartingaleFunctional shifted_linear(double shift);
/// g_c(t, X(t)) itself.
MartingaleFunctional exponential_martingale(double c);

struct DriftTestReport {
  std::string name;
  std::vector<double> t;
  std::vector<double> mean;
  std::vector<double> std_error;
  double k = 3.0;
  bool pass = false;
  std::optional<double> usable_until;  // set when the grid was cut at an overflow
};

struct DriftTestOptions {
  int grid_points = 11;
  double k = 3.0;
  Execution execution = Execution::Parallel;
};

/// Sample means of the functional on a uniform grid over [0, horizon] from
/// `replicas` infinite-capacity paths; passes iff every
/// |mean(t) - mean(0)| <= k (se(t) + se(0)).
DriftTestReport drift_test(const MartingaleFunctional& functional, const ModelParams& params, std::int64_t N,
                           const SystemState& init, double horizon, int replicas, std::uint64_t seed,
                           const DriftTestOptions& options = {});

// ---------------------------------------------------------------------------
// Hitting-time identities.
// ---------------------------------------------------------------------------

struct HittingMoments {
  double rhs1;  // closed form for E[e^{mu T1}]
  double rhs2;  // closed form for E[e^{2 mu T1}]
};

/// Needs rho > beta_bar and v.x0 < F_N / N.
HittingMoments exp_hitting_identity(const ModelParams& params, const ScaledParams& scaled, Vec2 x0_scaled);

/// Leading-order limit of N var(e^{mu T1}) as N -> infinity with F_N = beta_bar N.
double limiting_scaled_variance(const ModelParams& params, Vec2 x0_scaled);

/// T1 for each replica (nullopt if not hit within max_horizon).
std::vector<std::optional<double>> sample_hitting_times(const ModelParams& params, const ScaledParams& scaled,
                                                        Vec2 x0_scaled, int replicas, std::uint64_t seed,
                                                        double max_horizon,
                                                        Execution execution = Execution::Parallel);

struct VarianceRow {
  std::int64_t N;
  int hits;
  double mean;
  double variance;
  double scaled_variance;  // N * variance
};

struct VarianceScalingReport {
  std::vector<VarianceRow> rows;
  double reference = 0.0;   // limiting N var
  double spread = 1.0;      // max / min of N var over rows
  bool pass = false;        // spread < 5
};

VarianceScalingReport variance_scaling_check(const ModelParams& params, Vec2 x0_scaled,
                                             const std::vector<std::int64_t>& N_list, int replicas,
                                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Compensated jump martingales of the finite-capacity chain.
// ---------------------------------------------------------------------------

struct CompensatedMartingales {
  double sup_abs_m1 = 0.0;   // sup_{t <= t_end} |M1(t)|
  double sup_abs_m2 = 0.0;
  double bracket1 = 0.0;     // predictable <M1>(t_end)
  double bracket2 = 0.0;
  double quadratic1 = 0.0;   // realized [M1](t_end)
  double quadratic2 = 0.0;
};

/// M_i(t) = X_i(t) - X_i(0) - int_0^t (drift of X_i) du along an event-mode path.
CompensatedMartingales compensated_martingales(const Path& path, const ModelParams& params, double t_end);

}  // namespace storenet

#pragma once

#include <cstdint>
#include <vector>

#include "storenet/model.hpp"

namespace storenet {

// The free-capacity chain seen on the fast time scale: m -> m+1 at
// mu*beta_bar, m -> m-1 at lambda (m >= 1), m -> m-2 at xi (m >= 2).

struct FastTransition {
  int delta;
  double rate;
};

std::vector<FastTransition> fast_rates(std::int64_t m, const ModelParams& params);

/// Root in (-1, 0) of P(u) = -mu beta_bar u^2 + (lambda + xi) u + xi.
/// Throws Error("REQUIRES_OVERLOADED") unless rho > beta_bar.
double y_star(const ModelParams& params);

struct PiHeads {
  double pi0;
  double pi1;
};

/// Closed-form pi(0), pi(1) of the stationary law.
PiHeads pi_heads(const ModelParams& params);

/// P(u) from the generating-function identity.
double fast_chain_polynomial(const ModelParams& params, double u);

/// g(u) = sum_n pi(n) u^n on [-1, 1], with the removable singularity at
/// u = y* resolved by the ratio of derivatives.
double generating_function(const ModelParams& params, double u);

/// lambda (1 - pi0) + 2 xi (1 - pi0 - pi1) - mu beta_bar; zero at stationarity.
double drift_balance_residual(const ModelParams& params, PiHeads heads);

struct FastChainDistribution {
  std::vector<double> pi;   // pi[0..n_max]
  double tail_mass = 0.0;   // estimated mass beyond n_max
  std::int64_t n_max = 0;
};

/// Global balance solve on {0..n_max} with the up-move dropped at n_max.
/// Tail mass is extrapolated from the geometric decay of the last ten
/// entries; Error("TAIL_TOO_HEAVY") if it exceeds tol.
FastChainDistribution stationary_distribution(const ModelParams& params, std::int64_t n_max, double tol);

/// sum_m pi(m) (mu beta_bar - lambda 1{m>=1} - 2 xi 1{m>=2}).
double mean_drift(const ModelParams& params, const std::vector<double>& pi);

struct EmpiricalFastChain {
  std::vector<double> fraction;    // time fraction spent at m = 0, 1, ...
  std::vector<double> std_error;   // batch-means standard error of each fraction
  double horizon = 0.0;
};

/// Time-average occupation of the fast chain started at m = initial.
EmpiricalFastChain simulate_fast_chain(const ModelParams& params, double horizon, std::uint64_t seed,
                                       std::int64_t initial = 0, int batches = 50);

/// Total-variation distance between two probability vectors (shorter one
/// padded with zeros).
double total_variation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace storenet

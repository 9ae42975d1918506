#include "storenet/fast_chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "storenet/rng.hpp"

namespace storenet {

namespace {

void require_overloaded(const ModelParams& p) {
  validate(p);
  if (!(rho(p) > p.beta_bar))
    throw Error("REQUIRES_OVERLOADED", "the fast chain is positive recurrent only when rho > beta_bar");
}

}  // namespace

std::vector<FastTransition> fast_rates(std::int64_t m, const ModelParams& p) {
  std::vector<FastTransition> out{{+1, p.mu * p.beta_bar}};
  if (m >= 1) out.push_back({-1, p.lambda});
  if (m >= 2) out.push_back({-2, p.xi});
  return out;
}

double fast_chain_polynomial(const ModelParams& p, double u) {
  return -p.mu * p.beta_bar * u * u + (p.lambda + p.xi) * u + p.xi;
}

double y_star(const ModelParams& p) {
  require_overloaded(p);
  const double a = p.mu * p.beta_bar;
  const double b = p.lambda + p.xi;
  // Sign pattern P(-1) < 0 < P(0), P(1) isolates one root in (-1, 0).
  if (!(fast_chain_polynomial(p, -1.0) < 0.0 && fast_chain_polynomial(p, 1.0) > 0.0))
    throw Error("INTERNAL", "unexpected sign pattern of P on [-1, 1]");
  // (b - sqrt(b^2 + 4 a xi)) / (2a), written without cancellation.
  return -2.0 * p.xi / (b + std::sqrt(b * b + 4.0 * a * p.xi));
}

PiHeads pi_heads(const ModelParams& p) {
  const double y = y_star(p);
  const double load = p.lambda + 2.0 * p.xi;
  const double gap = load - p.mu * p.beta_bar;
  const double pi0 = (1.0 + y) * gap / (load * (1.0 + y) - 2.0 * p.mu * p.beta_bar * y);
  const double pi1 = gap / (2.0 * p.xi) - load / (2.0 * p.xi) * pi0;
  if (!(pi0 >= 0.0 && pi0 <= 1.0 && pi1 >= 0.0 && pi1 <= 1.0 && pi0 + pi1 <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << "pi0 = " << pi0 << ", pi1 = " << pi1;
    throw Error("INTERNAL", os.str());
  }
  return {pi0, pi1};
}

double generating_function(const ModelParams& p, double u) {
  if (!(u >= -1.0 && u <= 1.0)) throw Error("OUT_OF_RANGE", "u must lie in [-1, 1]");
  const PiHeads h = pi_heads(p);
  const double P = fast_chain_polynomial(p, u);
  if (std::abs(P) < 1e-8) {
    const double num_d = (p.lambda + p.xi) * h.pi0 + p.xi * (1.0 + 2.0 * u) * h.pi1;
    const double P_d = -2.0 * p.mu * p.beta_bar * u + p.lambda + p.xi;
    return num_d / P_d;
  }
  const double num = ((p.lambda + p.xi) * u + p.xi) * h.pi0 + p.xi * (1.0 + u) * u * h.pi1;
  return num / P;
}

double drift_balance_residual(const ModelParams& p, PiHeads h) {
  return p.lambda * (1.0 - h.pi0) + 2.0 * p.xi * (1.0 - h.pi0 - h.pi1) - p.mu * p.beta_bar;
}

FastChainDistribution stationary_distribution(const ModelParams& p, std::int64_t n_max, double tol) {
  require_overloaded(p);
  if (n_max < 10) throw Error("INVALID_ARGUMENT", "n_max must be at least 10");
  const auto n = static_cast<Eigen::Index>(n_max + 1);

  // Column j of Q^T holds the out-rates of state j; solve Q^T pi = 0 with
  // the last balance row replaced by normalization.
  Eigen::MatrixXd qt = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (const FastTransition& tr : fast_rates(j, p)) {
      const Eigen::Index to = j + tr.delta;
      if (to >= n) continue;  // reflecting truncation
      qt(to, j) += tr.rate;
      qt(j, j) -= tr.rate;
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  qt.row(n - 1).setOnes();
  rhs(n - 1) = 1.0;
  const Eigen::VectorXd sol = qt.partialPivLu().solve(rhs);

  FastChainDistribution d;
  d.n_max = n_max;
  d.pi.assign(sol.data(), sol.data() + n);
  for (double& v : d.pi) v = std::max(v, 0.0);

  // Entries far below the solve's roundoff carry no decay information, so the
  // geometric rate is read off the last stretch that is still resolved.
  std::int64_t k = n_max;
  while (k >= 10 && d.pi[static_cast<std::size_t>(k)] < 1e-12) --k;
  if (k >= 10) {
    const double last = d.pi[static_cast<std::size_t>(k)];
    const double earlier = d.pi[static_cast<std::size_t>(k - 10)];
    const double ratio = std::pow(last / earlier, 0.1);
    if (ratio >= 1.0) throw Error("TAIL_TOO_HEAVY", "no geometric decay at the truncation level");
    d.tail_mass = last * std::pow(ratio, static_cast<double>(n_max - k + 1)) / (1.0 - ratio);
  }
  if (d.tail_mass > tol) {
    std::ostringstream os;
    os << "estimated tail mass " << d.tail_mass << " exceeds " << tol << " at n_max = " << n_max;
    throw Error("TAIL_TOO_HEAVY", os.str());
  }
  double sum = 0.0;
  for (double v : d.pi) sum += v;
  const double scale = (1.0 - d.tail_mass) / sum;
  for (double& v : d.pi) v *= scale;
  return d;
}

double mean_drift(const ModelParams& p, const std::vector<double>& pi) {
  double drift = 0.0;
  for (std::size_t m = 0; m < pi.size(); ++m)
    drift += pi[m] * (p.mu * p.beta_bar - (m >= 1 ? p.lambda : 0.0) - (m >= 2 ? 2.0 * p.xi : 0.0));
  return drift;
}

EmpiricalFastChain simulate_fast_chain(const ModelParams& p, double horizon, std::uint64_t seed,
                                       std::int64_t initial, int batches) {
  require_overloaded(p);
  if (horizon < 0.0) throw Error("INVALID_HORIZON", "horizon must be non-negative");
  if (batches < 2) throw Error("INVALID_ARGUMENT", "need at least two batches");
  EmpiricalFastChain out;
  out.horizon = horizon;
  if (horizon == 0.0) {
    out.fraction.assign(static_cast<std::size_t>(initial) + 1, 0.0);
    out.fraction.back() = 1.0;
    out.std_error.assign(out.fraction.size(), 0.0);
    return out;
  }

  const auto nb = static_cast<std::size_t>(batches);
  const double batch_len = horizon / static_cast<double>(batches);
  std::vector<std::vector<double>> per_batch(nb);
  auto credit = [&](std::int64_t m, double a, double b) {
    while (a < b) {
      const auto k = std::min(nb - 1, static_cast<std::size_t>(a / batch_len));
      const double end = std::min(b, static_cast<double>(k + 1) * batch_len);
      auto& h = per_batch[k];
      if (h.size() <= static_cast<std::size_t>(m)) h.resize(static_cast<std::size_t>(m) + 1, 0.0);
      h[static_cast<std::size_t>(m)] += end - a;
      a = end;
    }
  };

  Stream rng(seed, 0);
  const double up = p.mu * p.beta_bar;
  std::int64_t m = initial;
  double t = 0.0;
  while (t < horizon) {
    const double down1 = m >= 1 ? p.lambda : 0.0;
    const double down2 = m >= 2 ? p.xi : 0.0;
    const double total = up + down1 + down2;
    const double next = std::min(horizon, t + rng.exponential(total));
    credit(m, t, next);
    t = next;
    if (t >= horizon) break;
    const double u = rng.uniform() * total;
    if (u < up) m += 1;
    else if (u < up + down1) m -= 1;
    else m -= 2;
  }

  std::size_t width = 0;
  for (const auto& h : per_batch) width = std::max(width, h.size());
  out.fraction.assign(width, 0.0);
  out.std_error.assign(width, 0.0);
  for (std::size_t s = 0; s < width; ++s) {
    double mean = 0.0;
    std::vector<double> f(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      f[k] = (s < per_batch[k].size() ? per_batch[k][s] : 0.0) / batch_len;
      mean += f[k];
    }
    mean /= static_cast<double>(nb);
    double ss = 0.0;
    for (double v : f) ss += (v - mean) * (v - mean);
    out.fraction[s] = mean;
    out.std_error[s] = std::sqrt(ss / static_cast<double>(nb - 1) / static_cast<double>(nb));
  }
  return out;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::max(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i < a.size() ? a[i] : 0.0;
    const double y = i < b.size() ? b[i] : 0.0;
    s += std::abs(x - y);
  }
  return 0.5 * s;
}

}  // namespace storenet

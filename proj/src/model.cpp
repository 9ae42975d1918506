#include "storenet/model.hpp"

#include <cmath>
#include <sstream>

namespace storenet {

void validate(const ModelParams& p) {
  auto check = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) {
      std::ostringstream os;
      os << name << " must be positive and finite (got " << v << ")";
      throw Error("INVALID_PARAMS", os.str());
    }
  };
  check(p.lambda, "lambda");
  check(p.xi, "xi");
  check(p.mu, "mu");
  check(p.beta_bar, "beta_bar");
}

std::int64_t ExtendedCount::value() const {
  if (infinite_) throw Error("INFINITE_VALUE", "value() on an infinite count");
  return value_;
}

ScaledParams ScaledParams::from_beta(const ModelParams& params, std::int64_t N) {
  // nearbyint honours the default FE_TONEAREST mode: ties go to even.
  const auto capacity = static_cast<std::int64_t>(std::nearbyint(params.beta_bar * static_cast<double>(N)));
  ScaledParams s{N, ExtendedCount(capacity)};
  validate(s);
  return s;
}

ScaledParams ScaledParams::infinite_capacity(std::int64_t N) {
  ScaledParams s{N, ExtendedCount::infinite()};
  validate(s);
  return s;
}

void validate(const ScaledParams& s) {
  if (s.N < 1) throw Error("INVALID_PARAMS", "N must be a positive integer");
  if (!s.F_N.is_infinite() && s.F_N.value() < 2)
    throw Error("INVALID_PARAMS", "F_N must be at least 2");
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::UnderLoaded: return "UnderLoaded";
    case Regime::Critical: return "Critical";
    case Regime::OverLoaded: return "OverLoaded";
  }
  return "?";
}

double rho(const ModelParams& p) { return (p.lambda + 2.0 * p.xi) / p.mu; }

Regime classify_regime(const ModelParams& p, double tol) {
  const double r = rho(p);
  if (std::abs(r - p.beta_bar) <= tol) return Regime::Critical;
  return r < p.beta_bar ? Regime::UnderLoaded : Regime::OverLoaded;
}

Vec2 equilibrium_point(const ModelParams& p) {
  return {p.xi / p.mu, (p.lambda + p.xi) / (2.0 * p.mu)};
}

ExtendedCount free_capacity(const SystemState& state, const ScaledParams& scaled) {
  if (scaled.F_N.is_infinite()) return ExtendedCount::infinite();
  const std::int64_t m = scaled.F_N.value() - occupied(state);
  if (m < 0) {
    std::ostringstream os;
    os << "x1 + 2 x2 = " << occupied(state) << " exceeds F_N = " << scaled.F_N.value();
    throw Error("CAPACITY_VIOLATION", os.str());
  }
  return ExtendedCount(m);
}

bool in_domain_S(Vec2 x, double beta_bar, double tol) {
  return x.x1 >= -tol && x.x2 >= -tol && load(x) <= beta_bar + tol;
}

SystemState state_from_scaled(Vec2 x, std::int64_t N) {
  const double n = static_cast<double>(N);
  return {0, static_cast<std::int64_t>(std::llround(x.x1 * n)),
          static_cast<std::int64_t>(std::llround(x.x2 * n))};
}

}  // namespace storenet

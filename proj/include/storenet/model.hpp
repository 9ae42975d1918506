#pragma once

#include <cstdint>
#include <string_view>

#include "storenet/error.hpp"

namespace storenet {

/// Per-server rates of the replicated storage network and the average
/// storage capacity per server. At system size N the duplication and
/// admission rates scale as lambda*N and xi*N; mu is the per-copy loss rate.
struct ModelParams {
  double lambda = 1.0;
  double xi = 1.0;
  double mu = 1.0;
  double beta_bar = 2.0;
};

/// Throws Error("INVALID_PARAMS") unless all four fields are positive and finite.
void validate(const ModelParams& params);

/// Count on the extended naturals {0, 1, ..., INFINITE}.
class ExtendedCount {
 public:
  constexpr explicit ExtendedCount(std::int64_t value) : value_(value), infinite_(false) {}

  static constexpr ExtendedCount infinite() { return ExtendedCount(); }

  constexpr bool is_infinite() const { return infinite_; }
  std::int64_t value() const;

  friend constexpr bool operator==(const ExtendedCount& a, const ExtendedCount& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  constexpr ExtendedCount() : value_(0), infinite_(true) {}

  std::int64_t value_;
  bool infinite_;
};

/// System size N and total capacity F_N.
struct ScaledParams {
  std::int64_t N = 1;
  ExtendedCount F_N{2};

  /// F_N = round-half-to-even(beta_bar * N).
  static ScaledParams from_beta(const ModelParams& params, std::int64_t N);
  static ScaledParams infinite_capacity(std::int64_t N);
};

void validate(const ScaledParams& scaled);

/// Lost files, single-copy files and double-copy files.
struct SystemState {
  std::int64_t x0 = 0;
  std::int64_t x1 = 0;
  std::int64_t x2 = 0;

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// Storage slots in use, x1 + 2 x2.
constexpr std::int64_t occupied(const SystemState& s) { return s.x1 + 2 * s.x2; }

/// Point of the fluid plane (x1, x2).
struct Vec2 {
  double x1 = 0.0;
  double x2 = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// The storage load functional v.x = x1 + 2 x2.
constexpr double load(Vec2 x) { return x.x1 + 2.0 * x.x2; }

enum class Regime { UnderLoaded, Critical, OverLoaded };

std::string_view to_string(Regime regime);

/// rho = (lambda + 2 xi) / mu, the load the unconstrained fluid settles at.
double rho(const ModelParams& params);

/// |rho - beta_bar| <= tol is Critical.
Regime classify_regime(const ModelParams& params, double tol = 0.0);

/// Fixed point (xi/mu, (lambda+xi)/(2mu)) of the unconstrained fluid ODE.
Vec2 equilibrium_point(const ModelParams& params);

/// m = F_N - 2 x2 - x1. Throws Error("CAPACITY_VIOLATION") if negative.
ExtendedCount free_capacity(const SystemState& state, const ScaledParams& scaled);

/// Membership in S = {x1 >= 0, x2 >= 0, x1 + 2 x2 <= beta_bar}, each
/// inequality relaxed by tol.
bool in_domain_S(Vec2 point, double beta_bar, double tol = 0.0);

/// Integer state nearest to N * x (lost-file count zero).
SystemState state_from_scaled(Vec2 x, std::int64_t N);

}  // namespace storenet

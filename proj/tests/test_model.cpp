#include <doctest.h>

#include <cmath>
#include <limits>

#include "storenet/ctmc.hpp"
#include "storenet/error.hpp"
#include "storenet/model.hpp"
#include "storenet/rng.hpp"

using namespace storenet;

namespace {

ModelParams P(double l, double x, double m, double b = 2.0) { return {l, x, m, b}; }

}  // namespace

TEST_CASE("rho from the rates") {
  CHECK(rho(P(1, 1, 1)) == 3.0);
  CHECK(rho(P(2, 0.5, 2)) == 1.5);
  CHECK(rho(P(1, 1, 2)) == 1.5);
}

TEST_CASE("regime classification") {
  CHECK(classify_regime(P(1, 1, 1, 2)) == Regime::OverLoaded);
  CHECK(classify_regime(P(1, 1, 1, 10)) == Regime::UnderLoaded);
  CHECK(classify_regime(P(1, 1, 1, 3)) == Regime::Critical);
  CHECK(classify_regime(P(1, 1, 1, 3.05), 0.1) == Regime::Critical);
  CHECK(classify_regime(P(1, 1, 1, 3.05), 0.0) == Regime::UnderLoaded);
}

TEST_CASE("regime is invariant under joint rate rescaling") {
  Stream rng(5, 0);
  for (int i = 0; i < 200; ++i) {
    const ModelParams p = P(0.1 + 3 * rng.uniform(), 0.1 + 3 * rng.uniform(), 0.1 + 3 * rng.uniform(),
                            0.1 + 10 * rng.uniform());
    const double c = std::ldexp(1.0, static_cast<int>(rng.uniform() * 10) - 5);
    const ModelParams q = P(c * p.lambda, c * p.xi, c * p.mu, p.beta_bar);
    CHECK(classify_regime(p) == classify_regime(q));
  }
}

TEST_CASE("equilibrium point") {
  CHECK(equilibrium_point(P(1, 1, 1)) == Vec2{1.0, 1.0});
  CHECK(equilibrium_point(P(2, 1, 1)) == Vec2{1.0, 1.5});
  CHECK(equilibrium_point(P(1, 2, 2)) == Vec2{1.0, 0.75});
}

TEST_CASE("equilibrium point location matches the regime") {
  for (double b : {2.0, 3.0, 10.0}) {
    const ModelParams p = P(1, 1, 1, b);
    const Vec2 e = equilibrium_point(p);
    const bool interior = e.x1 > 0 && e.x2 > 0 && load(e) < b;
    const bool on_face = load(e) == b;
    CHECK(interior == (classify_regime(p) == Regime::UnderLoaded));
    CHECK(on_face == (classify_regime(p) == Regime::Critical));
  }
}

TEST_CASE("free capacity") {
  const ScaledParams s{100, ExtendedCount(200)};
  CHECK(free_capacity({0, 10, 50}, s).value() == 90);
  CHECK(free_capacity({0, 0, 100}, s).value() == 0);
  CHECK(free_capacity({0, 10, 50}, ScaledParams::infinite_capacity(100)).is_infinite());
  CHECK_THROWS_AS(free_capacity({0, 1, 100}, s), Error);
}

TEST_CASE("free capacity changes by the transition deltas") {
  const ScaledParams s{100, ExtendedCount(200)};
  const SystemState w{3, 10, 50};
  const std::int64_t m = free_capacity(w, s).value();
  CHECK(free_capacity(apply(w, TransitionKind::Admission), s).value() == m - 2);
  CHECK(free_capacity(apply(w, TransitionKind::Duplication), s).value() == m - 1);
  CHECK(free_capacity(apply(w, TransitionKind::DoubleLoss), s).value() == m + 1);
  CHECK(free_capacity(apply(w, TransitionKind::SingleLoss), s).value() == m + 1);
}

TEST_CASE("domain S") {
  CHECK(in_domain_S({0.5, 0.25}, 2));
  CHECK(in_domain_S({0, 1.0}, 2));
  CHECK_FALSE(in_domain_S({3, 0}, 2));
  CHECK_FALSE(in_domain_S({-1e-9, 0}, 2));
  CHECK(in_domain_S({-1e-9, 0}, 2, 1e-8));
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(validate(P(1, 1, 1)));
  CHECK_THROWS_AS(validate(P(0, 1, 1)), Error);
  CHECK_THROWS_AS(validate(P(1, -1, 1)), Error);
  CHECK_THROWS_AS(validate(P(1, 1, std::numeric_limits<double>::infinity())), Error);
  CHECK_THROWS_AS(validate(P(1, 1, 1, std::nan(""))), Error);
  try {
    validate(P(1, 1, 0));
  } catch (const Error& e) {
    CHECK(e.code() == "INVALID_PARAMS");
  }
}

TEST_CASE("default capacity rounds half to even") {
  CHECK(ScaledParams::from_beta(P(1, 1, 1, 2), 10000).F_N.value() == 20000);
  CHECK(ScaledParams::from_beta(P(1, 1, 1, 2.5), 3).F_N.value() == 8);   // 7.5 -> 8
  CHECK(ScaledParams::from_beta(P(1, 1, 1, 2.5), 5).F_N.value() == 12);  // 12.5 -> 12
  CHECK_THROWS_AS(validate(ScaledParams{10, ExtendedCount(1)}), Error);
  CHECK_THROWS_AS(validate(ScaledParams{0, ExtendedCount(10)}), Error);
  CHECK_THROWS_AS(ExtendedCount::infinite().value(), Error);
}

TEST_CASE("scaled point to integer state") {
  const SystemState s = state_from_scaled({0.5, 0.25}, 10000);
  CHECK(s.x1 == 5000);
  CHECK(s.x2 == 2500);
  CHECK(s.x0 == 0);
}

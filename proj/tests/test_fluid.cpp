#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "storenet/error.hpp"
#include "storenet/fast_chain.hpp"
#include "storenet/fluid.hpp"
#include "storenet/rng.hpp"

using namespace storenet;

namespace {

const ModelParams kP{1, 1, 1, 2};

oracle::Field unconstrained(const ModelParams& p) {
  return [p](double, oracle::V2 y) {
    return oracle::V2{-p.lambda + p.mu * (2 * y.b - y.a), p.xi + p.lambda - 2 * p.mu * y.b};
  };
}

}  // namespace

TEST_CASE("interior solution") {
  CHECK(interior_solution(kP, {0.5, 0.25}, 0.0) == Vec2{0.5, 0.25});
  const Vec2 e = equilibrium_point(kP);
  for (double t : {0.0, 0.5, 3.0, 40.0}) {
    const Vec2 x = interior_solution(kP, e, t);
    CHECK(x.x1 == doctest::Approx(e.x1).epsilon(1e-15));
    CHECK(x.x2 == doctest::Approx(e.x2).epsilon(1e-15));
  }
  const Vec2 x = interior_solution(kP, {0.5, 0.25}, std::log(2.0));
  CHECK(x.x1 == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(x.x2 == doctest::Approx(0.8125).epsilon(1e-14));
  const auto rk = oracle::rk4(unconstrained(kP), {0.5, 0.25}, std::log(2.0), 2000);
  CHECK(std::abs(rk.a - x.x1) < 1e-10);
  CHECK(std::abs(rk.b - x.x2) < 1e-10);
}

TEST_CASE("interior solution: load identity and integral equations on random inputs") {
  Stream rng(77, 0);
  for (int i = 0; i < 200; ++i) {
    const ModelParams p{0.1 + 2 * rng.uniform(), 0.1 + 2 * rng.uniform(), 0.1 + 2 * rng.uniform(), 5.0};
    const Vec2 x0{2 * rng.uniform(), rng.uniform()};
    const double t = 3 * rng.uniform();
    const Vec2 x = interior_solution(p, x0, t);
    const double r = rho(p);
    CHECK(std::abs(load(x) - (r + (load(x0) - r) * std::exp(-p.mu * t))) < 1e-12);

    // x(t) = x0 + int_0^t f(x(s)) ds by composite Simpson.
    const int n = 400;
    double i1 = 0.0, i2 = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      const Vec2 y = interior_solution(p, x0, t * k / n);
      i1 += w * (-p.lambda + p.mu * (2 * y.x2 - y.x1));
      i2 += w * (p.xi + p.lambda - 2 * p.mu * y.x2);
    }
    i1 *= t / (3.0 * n);
    i2 *= t / (3.0 * n);
    CHECK(std::abs(x.x1 - x0.x1 - i1) < 1e-8);
    CHECK(std::abs(x.x2 - x0.x2 - i2) < 1e-8);
  }
}

TEST_CASE("hitting time T0") {
  auto load_at = [](Vec2 x0) {
    return [x0](double t) { return load(interior_solution(kP, x0, t)) - 2.0; };
  };
  CHECK(hitting_time_T0(kP, {0.5, 0.25}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(oracle::bisect(load_at({0.5, 0.25}), 0.0, 5.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(hitting_time_T0(kP, {1.0, 0.25}) == doctest::Approx(std::log(1.5)).epsilon(1e-14));
  CHECK(oracle::bisect(load_at({1.0, 0.25}), 0.0, 5.0) == doctest::Approx(std::log(1.5)).epsilon(1e-12));
  CHECK(hitting_time_T0(kP, {1.0, 0.5}) == 0.0);
  const double t0 = hitting_time_T0(kP, {0.3, 0.1});
  CHECK(std::abs(load(interior_solution(kP, {0.3, 0.1}, t0)) - 2.0) < 1e-10);

  CHECK_THROWS_AS(hitting_time_T0({1, 1, 1, 10}, {0.5, 0.25}), Error);
  CHECK_THROWS_AS(hitting_time_T0(kP, {3.0, 0.0}), Error);
}

TEST_CASE("boundary drift") {
  const double pi0 = pi_heads(kP).pi0;
  const Vec2 d = boundary_drift(kP, pi0, {0.594173, 0.702914});
  CHECK(std::abs(d.x1) < 1e-5);
  CHECK(std::abs(d.x2) < 1e-5);
  const Vec2 fp = boundary_fixed_point(kP, pi0);
  CHECK(fp.x1 == doctest::Approx(0.594173).epsilon(1e-6));
  CHECK(fp.x2 == doctest::Approx(0.702914).epsilon(1e-6));

  Stream rng(3, 0);
  for (int i = 0; i < 50; ++i) {
    const Vec2 y{3 * rng.uniform(), 3 * rng.uniform()};
    const Vec2 g = boundary_drift(kP, pi0, y);
    CHECK(g.x1 + 2 * g.x2 == doctest::Approx(kP.mu * (kP.beta_bar - load(y))).epsilon(1e-12));
  }
  const Vec2 free = boundary_drift(kP, 1.0, {0.3, 0.6});
  CHECK(free.x1 == doctest::Approx(kP.mu * (2 * 0.6 - 0.3)));
  CHECK(free.x2 == doctest::Approx(kP.mu * kP.beta_bar / 2 - 2 * kP.mu * 0.6));
}

TEST_CASE("boundary solution") {
  const double pi0 = pi_heads(kP).pi0;
  const Vec2 y0{1.0, 0.5};
  CHECK(boundary_solution(kP, pi0, y0, 0.0).x1 == doctest::Approx(1.0).epsilon(1e-15));
  for (double t = 0.0; t <= 10.0; t += 0.25) CHECK(std::abs(load(boundary_solution(kP, pi0, y0, t)) - 2.0) < 1e-9);
  const Vec2 late = boundary_solution(kP, pi0, y0, 15.0);
  const Vec2 fp = boundary_fixed_point(kP, pi0);
  CHECK(std::abs(late.x1 - fp.x1) < 1e-6);
  CHECK(std::abs(late.x2 - fp.x2) < 1e-6);

  const auto rk = oracle::rk4(
      [&](double, oracle::V2 y) {
        const Vec2 g = boundary_drift(kP, pi0, {y.a, y.b});
        return oracle::V2{g.x1, g.x2};
      },
      {1.0, 0.5}, 2.0, 2000);
  const Vec2 at2 = boundary_solution(kP, pi0, y0, 2.0);
  CHECK(std::abs(rk.a - at2.x1) < 1e-10);
  CHECK(std::abs(rk.b - at2.x2) < 1e-10);

  CHECK_THROWS_AS(boundary_solution(kP, pi0, {0.5, 0.25}, 1.0), Error);
}

TEST_CASE("fluid trajectory: under-loaded stays interior") {
  const ModelParams u{1, 1, 1, 10};
  const FluidTrajectory f = fluid_trajectory(u, {0.5, 0.25}, 5.0, 0.01);
  CHECK(f.regime == Regime::UnderLoaded);
  CHECK_FALSE(f.contact_time.has_value());
  CHECK_FALSE(f.numeric);
  CHECK(f.points.size() == 501);
  CHECK(f.points.back().x1 == doctest::Approx(1.0).epsilon(2e-2));
  CHECK(f.points.back().x2 == doctest::Approx(1.0).epsilon(2e-2));
}

TEST_CASE("fluid trajectory: overloaded contact then boundary branch") {
  const FluidTrajectory f = fluid_trajectory(kP, {0.5, 0.25}, 3.0, 0.001);
  REQUIRE(f.contact_time.has_value());
  CHECK(*f.contact_time == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_FALSE(f.numeric);
  CHECK_FALSE(f.unspecified_corner);
  for (const auto& p : f.points) {
    CHECK(in_domain_S({p.x1, p.x2}, 2.0, 1e-9));
    if (p.t > *f.contact_time) CHECK(p.on_boundary2);
  }
  // Strictly increasing load before contact.
  for (std::size_t k = 1; k < f.points.size() && f.points[k].t < *f.contact_time; ++k)
    CHECK(load({f.points[k].x1, f.points[k].x2}) > load({f.points[k - 1].x1, f.points[k - 1].x2}));
  // Continuity across contact.
  for (std::size_t k = 1; k < f.points.size(); ++k) {
    CHECK(std::abs(f.points[k].x1 - f.points[k - 1].x1) < 0.01);
    CHECK(std::abs(f.points[k].x2 - f.points[k - 1].x2) < 0.01);
  }
  const double pi0 = pi_heads(kP).pi0;
  const Vec2 fp = boundary_fixed_point(kP, pi0);
  CHECK(std::abs(f.points.back().x1 - fp.x1) < 0.05);
}

TEST_CASE("fluid trajectory: start on the face") {
  const FluidTrajectory f = fluid_trajectory(kP, {1.0, 0.5}, 1.0, 0.01);
  REQUIRE(f.contact_time.has_value());
  CHECK(*f.contact_time == 0.0);
  const Vec2 b = boundary_solution(kP, pi_heads(kP).pi0, {1.0, 0.5}, 1.0);
  CHECK(f.points.back().x1 == doctest::Approx(b.x1).epsilon(1e-12));
}

TEST_CASE("fluid trajectory falls back to the reflection solver when x1 would go negative") {
  // Starting at x1 = 0 with little x2: the closed form dips below 0.
  const FluidTrajectory f = fluid_trajectory({1, 0.1, 1, 10}, {0.0, 0.01}, 2.0, 0.001);
  CHECK(f.numeric);
  for (const auto& p : f.points) CHECK(in_domain_S({p.x1, p.x2}, 10.0, 1e-9));
  CHECK_THROWS_AS(fluid_trajectory(kP, {3.0, 0.0}, 1.0, 0.01), Error);
}

TEST_CASE("sup distance") {
  const FluidTrajectory f = fluid_trajectory(kP, {0.5, 0.25}, 1.0, 0.01);
  std::vector<Vec2> same;
  for (const auto& p : f.points) same.push_back({p.x1, p.x2});
  CHECK(sup_distance(f, same) == 0.0);
  same[10].x2 += 0.125;
  CHECK(sup_distance(f, same) == 0.125);
  same.pop_back();
  CHECK_THROWS_AS(sup_distance(f, same), Error);
}

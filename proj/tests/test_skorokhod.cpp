#include <doctest.h>

#include <cmath>
#include <numbers>

#include "skorokhod_checks.hpp"
#include "storenet/error.hpp"
#include "storenet/fast_chain.hpp"
#include "storenet/fluid.hpp"
#include "storenet/skorokhod.hpp"

using namespace storenet;

namespace {

const ModelParams kP{1, 1, 1, 2};

double sup_error_vs_interior(double dt) {
  const auto s = solve_2d(SkorokhodData::from_model(kP, zero_weights()), {0.5, 0.25}, 0.5, dt);
  double err = 0.0;
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    const Vec2 e = interior_solution(kP, {0.5, 0.25}, s.t[k]);
    err = std::max({err, std::abs(e.x1 - s.z[k].x1), std::abs(e.x2 - s.z[k].x2)});
  }
  return err;
}

double sup_error_vs_boundary(double dt) {
  const PiHeads h = pi_heads(kP);
  const Vec2 y0{1.0, 0.5};
  const auto data =
      SkorokhodData::from_model(kP, stationary_on_capacity_face(h.pi0, h.pi1, 2.0, face_tolerance(2.0)));
  const auto s = solve_2d(data, y0, 2.0, dt);
  double err = 0.0;
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    const Vec2 e = boundary_solution(kP, h.pi0, y0, s.t[k]);
    err = std::max({err, std::abs(e.x1 - s.z[k].x1), std::abs(e.x2 - s.z[k].x2)});
  }
  return err;
}

}  // namespace

TEST_CASE("reflect_1d examples") {
  std::vector<double> v(101);
  for (int i = 0; i <= 100; ++i) v[i] = -0.01 * i;
  auto r = reflect_1d(v);
  for (int i = 0; i <= 100; ++i) {
    CHECK(r.z[i] == 0.0);
    CHECK(r.y[i] == doctest::Approx(0.01 * i));
  }

  for (int i = 0; i <= 100; ++i) v[i] = 0.01 * i;
  r = reflect_1d(v);
  for (int i = 0; i <= 100; ++i) {
    CHECK(r.y[i] == 0.0);
    CHECK(r.z[i] == v[i]);
  }

  const double two_pi = 2 * std::numbers::pi;
  const auto n = static_cast<std::size_t>(std::llround(two_pi / 1e-3));
  std::vector<double> s(n + 1);
  for (std::size_t i = 0; i <= n; ++i) s[i] = std::sin(two_pi * static_cast<double>(i) / static_cast<double>(n));
  r = reflect_1d(s);
  const auto brute = oracle::minimal_regulator(s);
  CHECK(r.y.back() == doctest::Approx(brute.back()).epsilon(1e-15));
  CHECK(r.y.back() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.z.back() == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(reflect_1d(std::vector<double>{-0.1, 0.0}), Error);
}

TEST_CASE("reflect_1d complementarity and minimality on random paths") {
  Stream rng(1234, 0);
  for (int c = 0; c < 200; ++c) {
    const auto v = checks::random_walk(rng, 100);
    CHECK(checks::check_reflection_1d(v, rng) == "");
  }
}

TEST_CASE("solve_2d without boundary contact matches the interior solution to first order") {
  const double e2 = sup_error_vs_interior(1e-2);
  const double e3 = sup_error_vs_interior(1e-3);
  CHECK(e2 < 1e-2);
  CHECK(e2 / e3 > 5.0);
  CHECK(e2 / e3 < 20.0);
}

TEST_CASE("solve_2d on the capacity face matches the boundary solution to first order") {
  const double e2 = sup_error_vs_boundary(1e-2);
  const double e3 = sup_error_vs_boundary(1e-3);
  CHECK(e2 < 1e-2);
  CHECK(e2 / e3 > 5.0);
  CHECK(e2 / e3 < 20.0);
}

TEST_CASE("solve_2d pushes at the x1 face") {
  const auto s = solve_2d(SkorokhodData::from_model(kP, zero_weights()), {0.0, 0.0}, 0.1, 1e-3);
  CHECK(checks::check_reflected_2d(s, 2.0) == "");
  for (std::size_t k = 1; k < 20; ++k) {
    CHECK(s.z[k].x1 == 0.0);
    CHECK(s.y[k].x1 > s.y[k - 1].x1);
  }
}

TEST_CASE("solve_2d invariants on a full overloaded run") {
  const PiHeads h = pi_heads(kP);
  const auto data =
      SkorokhodData::from_model(kP, stationary_on_capacity_face(h.pi0, h.pi1, 2.0, face_tolerance(2.0)));
  const auto s = solve_2d(data, {0.5, 0.25}, 5.0, 1e-3);
  CHECK(checks::check_reflected_2d(s, 2.0) == "");
  CHECK_FALSE(s.corner_stall);
  // After contact the path stays on the face near the boundary fixed point.
  CHECK(load(s.z.back()) == doctest::Approx(2.0).epsilon(1e-9));
  const Vec2 fp = boundary_fixed_point(kP, h.pi0);
  CHECK(s.z.back().x1 == doctest::Approx(fp.x1).epsilon(1e-2));
}

TEST_CASE("solve_2d flags the corner and rejects bad data") {
  SkorokhodData d = SkorokhodData::from_model(kP, zero_weights());
  d.theta = {-1.0, 2.0};
  d.A = {0, 0, 0, 0};
  const auto s = solve_2d(d, {0.0, 1.0}, 1.0, 1e-3);
  CHECK(s.corner_stall);

  SkorokhodData bad = SkorokhodData::from_model(kP, zero_weights());
  bad.R = {1, 1, 1, 1};
  CHECK_THROWS_AS(solve_2d(bad, {0.5, 0.25}, 1.0, 1e-3), Error);
  CHECK_THROWS_AS(solve_2d(SkorokhodData::from_model(kP, zero_weights()), {3.0, 0.0}, 1.0, 1e-3), Error);
}

TEST_CASE("solve_2d first coordinate agrees with reflect_1d when the capacity face is idle") {
  SkorokhodData d = SkorokhodData::from_model({1, 1, 1, 100}, zero_weights());
  d.theta = {-1.0, 0.0};
  d.A = {0, 0, 0, 0};
  const double dt = 1e-3;
  const auto s = solve_2d(d, {0.5, 1.0}, 2.0, dt);
  std::vector<double> v(s.t.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = 0.5 - s.t[k];
  const auto r = reflect_1d(v);
  for (std::size_t k = 0; k < v.size(); ++k) CHECK(std::abs(r.z[k] - s.z[k].x1) < 1e-9);
}

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "hypertree/errors.hpp"
#include "hypertree/geometry.hpp"
#include "support/oracles.hpp"

using namespace hypertree;
using hypertree::testing::central_difference;
using hypertree::testing::norm2;
using hypertree::testing::random_point;
using hypertree::testing::reference_distance;
using hypertree::testing::relative_error;

using Vec = std::vector<double>;

TEST_CASE("point construction enforces the ball and dimension") {
  CHECK_NOTHROW(PoincarePoint(Vec{0.3, 0.4}));
  CHECK_THROWS_AS(PoincarePoint(Vec{0.5}), InputError);
  CHECK_THROWS_AS(PoincarePoint(Vec{0.6, 0.8}), InputError);
  CHECK_THROWS_AS(PoincarePoint(Vec{NAN, 0.0}), InputError);
  const auto o = PoincarePoint::origin(3);
  CHECK(o.dim() == 3);
  CHECK(squared_norm(o) == 0.0);
}

TEST_CASE("distance examples") {
  CHECK(poincare_distance(Vec{0.3, 0}, Vec{0.3, 0}) == 0.0);
  CHECK(poincare_distance(Vec{0, 0}, Vec{0.5, 0}) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(poincare_distance(Vec{0.5, 0}, Vec{-0.5, 0}) ==
        doctest::Approx(2 * std::log(3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(poincare_distance(Vec{0, 0}, Vec{0, 0, 0}), InputError);
}

TEST_CASE("distance agrees with the acosh formula and is a metric") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t dim = 2 + trial % 9;
    const auto u = random_point(rng, dim, 0.95);
    const auto v = random_point(rng, dim, 0.95);
    const auto w = random_point(rng, dim, 0.95);
    const double duv = poincare_distance(u, v);
    CHECK(duv == doctest::Approx(reference_distance(u, v)).epsilon(1e-10));
    CHECK(duv == poincare_distance(v, u));
    CHECK(duv >= 0.0);
    CHECK(duv <= poincare_distance(u, w) + poincare_distance(w, v) + 1e-9);
  }
}

TEST_CASE("hyperbolic norm") {
  CHECK(hyperbolic_norm(Vec{0, 0}) == 0.0);
  CHECK(hyperbolic_norm(Vec{0.5, 0}) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(hyperbolic_norm(Vec{0, 0.8}) == doctest::Approx(std::log(9.0)).epsilon(1e-12));
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto u = random_point(rng, 2 + trial % 5, 0.999);
    const Vec o(u.size(), 0.0);
    CHECK(std::abs(hyperbolic_norm(u) - poincare_distance(o, u)) <= 1e-12);
  }
}

TEST_CASE("dilation") {
  const Vec u{0.3, -0.2};
  CHECK(dilate(u, 1.0) == u);
  const auto d2 = dilate(Vec{0.5, 0}, 2.0);
  CHECK(norm2(d2) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(d2[1] == 0.0);
  CHECK(dilate(Vec{0, 0, 0}, 3.0) == Vec{0, 0, 0});
  CHECK_THROWS_AS(dilate(u, 0.0), InputError);
  CHECK_THROWS_AS(dilate(u, -1.0), InputError);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = random_point(rng, 2 + trial % 4, 0.7);
    const double k1 = 0.5 + 0.01 * (trial % 100), k2 = 1.1;
    const auto once = dilate(p, k1);
    CHECK(std::abs(hyperbolic_norm(once) - k1 * hyperbolic_norm(p)) <= 1e-9);
    const auto twice = dilate(once, k2);
    const auto direct = dilate(p, k1 * k2);
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(std::abs(twice[k] - direct[k]) <= 1e-9);
    // direction preserved
    const double cosine = [&] {
      double dot = 0;
      for (std::size_t k = 0; k < p.size(); ++k) dot += p[k] * once[k];
      return dot / (norm2(p) * norm2(once));
    }();
    CHECK(cosine == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("dilation output stays inside the margin") {
  const auto far = dilate(Vec{0.99, 0}, 50.0, 1e-5);
  CHECK(norm2(far) <= 1.0 - 1e-5 + 1e-15);
}

TEST_CASE("distance gradient") {
  SUBCASE("coincident points give zero") {
    const auto g = distance_gradient(Vec{0.3, 0.1}, Vec{0.3, 0.1});
    CHECK(g.du == Vec{0, 0});
    CHECK(g.dv == Vec{0, 0});
  }
  SUBCASE("origin to (0.5, 0)") {
    const Vec v{0.5, 0};
    const auto fd = central_difference([&](std::span<const double> x) { return reference_distance(x, v); },
                                       Vec{0, 0});
    const auto g = distance_gradient(Vec{0, 0}, v);
    CHECK(g.du[0] == doctest::Approx(fd[0]).epsilon(1e-6));
    CHECK(g.du[0] == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(g.du[1] == 0.0);
  }
  SUBCASE("random pairs against finite differences") {
    std::mt19937_64 rng(4);
    for (std::size_t dim : {2u, 5u, 10u}) {
      for (int trial = 0; trial < 200; ++trial) {
        const auto u = random_point(rng, dim, 0.95);
        const auto v = random_point(rng, dim, 0.95);
        const auto g = distance_gradient(u, v);
        const auto fu = central_difference(
            [&](std::span<const double> x) { return reference_distance(x, v); }, u);
        const auto fv = central_difference(
            [&](std::span<const double> x) { return reference_distance(u, x); }, v);
        CHECK(relative_error(g.du, fu) <= 1e-5);
        CHECK(relative_error(g.dv, fv) <= 1e-5);
      }
    }
  }
  SUBCASE("accumulating form adds a scaled gradient") {
    const Vec u{0.1, 0.4}, v{-0.3, 0.2};
    const auto g = distance_gradient(u, v);
    Vec du{1.0, 1.0}, dv{0.0, 0.0};
    accumulate_distance_gradient(u, v, 2.0, du, dv);
    for (int k = 0; k < 2; ++k) {
      CHECK(du[k] == doctest::Approx(1.0 + 2.0 * g.du[k]).epsilon(1e-14));
      CHECK(dv[k] == doctest::Approx(2.0 * g.dv[k]).epsilon(1e-14));
    }
  }
}

TEST_CASE("riemannian rescale") {
  CHECK(riemannian_rescale(Vec{0, 0}, Vec{4, -8}) == Vec{1, -2});
  CHECK(riemannian_rescale(Vec{0.5, 0}, Vec{0, 0}) == Vec{0, 0});
  const auto near_edge = riemannian_rescale(Vec{1 - 1e-9, 0}, Vec{1, 1});
  CHECK(norm2(near_edge) < 1e-15);
  const auto mid = riemannian_rescale(Vec{0.6, 0}, Vec{1, 2});
  CHECK(mid[0] == doctest::Approx(0.64 * 0.64 / 4).epsilon(1e-14));
  CHECK(mid[1] == doctest::Approx(2 * 0.64 * 0.64 / 4).epsilon(1e-14));
}

TEST_CASE("projection") {
  CHECK(project_to_ball(Vec{0.2, 0.1}, 1e-5) == Vec{0.2, 0.1});
  CHECK(project_to_ball(Vec{0, 0}) == Vec{0, 0});
  const auto p = project_to_ball(Vec{0.72, 0.96}, 1e-5);  // norm 1.2
  CHECK(norm2(p) == doctest::Approx(1 - 1e-5).epsilon(1e-14));
  CHECK(p[0] / p[1] == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("inversion to the origin") {
  CHECK(inversion_to_origin(Vec{0, 0}).is_identity());
  const auto p = inversion_to_origin(Vec{0.5, 0});
  REQUIRE_FALSE(p.is_identity());
  CHECK(p.center[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p.center[1] == 0.0);
  CHECK(p.radius_sq == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(squared_norm(p.center) - 1.0 == doctest::Approx(p.radius_sq).epsilon(1e-14));
  CHECK(norm2(apply_inversion(p, Vec{0.5, 0})) <= 1e-12);
  CHECK(apply_inversion(InversionParams{}, Vec{0.1, 0.2}) == Vec{0.1, 0.2});
  CHECK_THROWS_AS(apply_inversion(p, Vec{2.0, 0.0}), std::logic_error);
}

TEST_CASE("inversion is an isometric involution") {
  std::mt19937_64 rng(5);
  for (std::size_t dim : {2u, 5u}) {
    for (int trial = 0; trial < 300; ++trial) {
      const auto a = random_point(rng, dim, 0.9);
      const auto x = random_point(rng, dim, 0.9);
      const auto y = random_point(rng, dim, 0.9);
      const auto p = inversion_to_origin(a);
      CHECK(norm2(apply_inversion(p, a)) <= 1e-12);
      const auto fx = apply_inversion(p, x), fy = apply_inversion(p, y);
      CHECK(norm2(fx) < 1.0);
      CHECK(std::abs(poincare_distance(fx, fy) - poincare_distance(x, y)) <= 1e-9);
      const auto back = apply_inversion(p, fx);
      for (std::size_t k = 0; k < dim; ++k) CHECK(std::abs(back[k] - x[k]) <= 1e-9);
    }
  }
}

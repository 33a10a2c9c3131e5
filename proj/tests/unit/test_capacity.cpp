#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hypertree/capacity.hpp"
#include "hypertree/errors.hpp"
#include "hypertree/geometry.hpp"
#include "support/oracles.hpp"

using namespace hypertree;
using std::numbers::pi;

namespace {

// Point at hyperbolic distance r from the origin in direction angle.
void place(EmbeddingTable& t, NodeId n, double r, double angle) {
  const double a = std::tanh(r / 2);
  t.row(n)[0] = a * std::cos(angle);
  t.row(n)[1] = a * std::sin(angle);
}

HierarchyGraph star(std::size_t leaves) {
  HierarchyGraph g;
  g.add_node("c");
  for (std::size_t k = 0; k < leaves; ++k) g.add_edge(g.add_node("l" + std::to_string(k)), 0);
  g.validate_tree();
  return g;
}

}  // namespace

TEST_CASE("packing angle") {
  CHECK(packing_angle(0.0) == doctest::Approx(pi / 3).epsilon(1e-14));
  CHECK(packing_angle(2.0) == doctest::Approx(2 * std::asin(1 / (2 * std::cosh(1.0)))).epsilon(1e-14));
  CHECK(packing_angle(2.0) == doctest::Approx(0.659966).epsilon(1e-6));
  CHECK(std::abs(packing_angle(20.0) / (2 * std::exp(-10.0)) - 1) < 0.01);
  CHECK_THROWS_AS(packing_angle(-0.1), InputError);
  double prev = packing_angle(0.0);
  for (double r = 0.25; r <= 20.0; r += 0.25) {
    const double cur = packing_angle(r);
    CHECK(cur < prev);
    CHECK(cur < pi / 3);
    prev = cur;
  }
}

TEST_CASE("lower bound examples") {
  CHECK(capacity_lower_bound(2, 2.0) == doctest::Approx(pi * std::exp(1.0)).epsilon(1e-14));
  CHECK(capacity_lower_bound(5, 2.0) ==
        doctest::Approx(std::sqrt(10 * pi) * std::pow(2.0, -4) * std::exp(4.0)).epsilon(1e-14));
  CHECK(capacity_lower_bound(5, 2.0) == doctest::Approx(19.13).epsilon(1e-3));
  CHECK(capacity_lower_bound(2, 0.0) == doctest::Approx(pi).epsilon(1e-14));
  const double d = 20;
  CHECK(capacity_lower_bound(20, 1.0) ==
        doctest::Approx(std::sqrt(2 * pi) * std::log(2 / std::sqrt(3.0)) * std::pow(d, 1.5) *
                        std::pow(2.0, 1 - d) * std::exp((d - 1) / 2))
            .epsilon(1e-13));
  CHECK_THROWS_AS(capacity_lower_bound(1, 1.0), InputError);
  CHECK_THROWS_AS(capacity_lower_bound(3, -1.0), InputError);
}

TEST_CASE("upper bound examples") {
  CHECK(capacity_upper_bound(3, 2.0) == doctest::Approx(8 * std::exp(3.0)).epsilon(1e-14));
  CHECK(capacity_upper_bound(3, 2.0) == doctest::Approx(160.68).epsilon(1e-4));
  CHECK(capacity_upper_bound(2, 2.0) == capacity_lower_bound(2, 2.0));
  CHECK(capacity_upper_bound(10, 0.0) == doctest::Approx(1024.0).epsilon(1e-14));
  CHECK_THROWS_AS(capacity_upper_bound(0, 1.0), InputError);
}

TEST_CASE("bounds are ordered and monotone over the grid") {
  for (int d = 2; d <= 30; ++d) {
    double prev_lo = 0, prev_hi = 0;
    for (int step = 0; step <= 40; ++step) {
      const double r = 0.5 * step;
      const double lo = capacity_lower_bound(d, r), hi = capacity_upper_bound(d, r);
      CHECK(lo <= hi);
      CHECK(lo >= prev_lo);
      CHECK(hi >= prev_hi);
      prev_lo = lo;
      prev_hi = hi;
      const auto est = CapacityEstimate::at(d, r);
      CHECK(est.lower_bound == lo);
      CHECK(est.upper_bound == hi);
      CHECK(est.packing_angle == packing_angle(r));
    }
  }
}

TEST_CASE("node radius") {
  SUBCASE("degree one picks the nearest point") {
    HierarchyGraph g = star(2);  // leaf l0 has degree 1
    EmbeddingTable t(3, 2);
    place(t, 1, 0.0, 0.0);
    place(t, 0, 0.7, 0.3);
    place(t, 2, 1.5, 2.0);
    CHECK(node_radius(1, t, g) == doctest::Approx(0.7).epsilon(1e-12));
  }
  SUBCASE("degree three picks the third order statistic") {
    HierarchyGraph g = star(3);
    g.add_edge(g.add_node("x"), 1);
    g.validate_tree();
    EmbeddingTable t(5, 2);
    place(t, 1, 0.2, 0.0);
    place(t, 2, 0.5, 1.5);
    place(t, 3, 0.9, 3.0);
    place(t, 4, 1.4, 4.5);
    REQUIRE(g.degree(0) == 3);
    CHECK(node_radius(0, t, g) == doctest::Approx(0.9).epsilon(1e-12));
  }
  SUBCASE("coincident points") {
    const HierarchyGraph g = star(4);
    const EmbeddingTable t(5, 2);
    CHECK(node_radius(0, t, g) == 0.0);
  }
  SUBCASE("single node") {
    HierarchyGraph g;
    g.add_node("only");
    CHECK_THROWS_AS(node_radius(0, EmbeddingTable(1, 2), g), InputError);
  }
}

TEST_CASE("capacity check") {
  SUBCASE("degree 4 at radius 2 in the plane is fine, degree 20 is not") {
    for (std::size_t deg : {4u, 20u}) {
      const HierarchyGraph g = star(deg);
      EmbeddingTable t(deg + 1, 2);
      for (NodeId k = 1; k <= deg; ++k) place(t, k, 2.0, 2 * pi * k / static_cast<double>(deg));
      REQUIRE(node_radius(0, t, g) == doctest::Approx(2.0).epsilon(1e-12));
      const auto off = capacity_check(t, g, 2);
      const bool center_flagged =
          std::any_of(off.begin(), off.end(), [](const CapacityOffender& o) { return o.node == 0; });
      CHECK(center_flagged == (deg == 20));
      for (const auto& o : off) {
        CHECK(static_cast<double>(o.degree) > o.lower_bound);
        CHECK(o.lower_bound == capacity_lower_bound(2, o.radius));
      }
    }
  }
  SUBCASE("two-node path is never an offender") {
    HierarchyGraph g;
    const NodeId a = g.add_node("a");
    g.add_edge(a, g.add_node("b"));
    g.validate_tree();
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
      const auto t = hypertree::testing::random_table(rng, 2, 2);
      CHECK(capacity_check(t, g, 2).empty());
    }
  }
  SUBCASE("agrees with a direct per-node scan and reports ascending ids") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
      HierarchyGraph g = hypertree::testing::random_tree(rng, 30);
      const int d = 2 + trial % 3;
      const auto t = hypertree::testing::random_table(rng, 30, static_cast<std::size_t>(d), 0.3);
      const auto off = capacity_check(t, g, d);
      std::vector<NodeId> expected;
      for (NodeId n = 0; n < 30; ++n)
        if (static_cast<double>(g.degree(n)) > capacity_lower_bound(d, node_radius(n, t, g)))
          expected.push_back(n);
      std::vector<NodeId> got;
      for (const auto& o : off) got.push_back(o.node);
      CHECK(got == expected);
    }
  }
}

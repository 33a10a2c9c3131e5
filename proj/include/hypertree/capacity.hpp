#pragma once

#include <vector>

#include "hypertree/embedding.hpp"
#include "hypertree/graph.hpp"

namespace hypertree {

/// Local-capacity summary at Poincare radius `radius` in dimension `dim`.
struct CapacityEstimate {
  int dim;
  double radius;
  double packing_angle;
  double lower_bound;
  double upper_bound;

  /// Evaluates all fields; asserts lower_bound <= upper_bound.
  static CapacityEstimate at(int dim, double radius);
};

/// A node whose tree degree exceeds the guaranteed capacity at its radius.
struct CapacityOffender {
  NodeId node;
  std::size_t degree;
  double radius;
  double lower_bound;
};

/// Minimum angle at the origin between two points at hyperbolic radius r that
/// keeps their mutual distance above r: 2 asin(1 / (2 cosh(r/2))).
double packing_angle(double r);

/// Guaranteed (lower) estimate of the spherical-code size A(d, packing_angle(r)).
double capacity_lower_bound(int d, double r);

/// Upper estimate of A(d, packing_angle(r)).
double capacity_upper_bound(int d, double r);

/// Distance from `node` to its k-th nearest other embedded point, k = tree degree.
double node_radius(NodeId node, const EmbeddingTable& theta, const HierarchyGraph& graph);

/// Every node whose degree exceeds capacity_lower_bound(d, node_radius), by ascending id.
std::vector<CapacityOffender> capacity_check(const EmbeddingTable& theta,
                                             const HierarchyGraph& graph, int d);

}  // namespace hypertree

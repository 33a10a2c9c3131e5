#include "hypertree/capacity.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "hypertree/errors.hpp"
#include "hypertree/geometry.hpp"

namespace hypertree {

namespace {

void require_dim(int d) {
  if (d < 2) {
    throw InputError("capacity bounds need d >= 2, got " + std::to_string(d));
  }
}

void require_radius(double r) {
  if (!(r >= 0.0)) {
    throw InputError("radius must be non-negative");
  }
}

}  // namespace

CapacityEstimate CapacityEstimate::at(int dim, double radius) {
  CapacityEstimate est{dim, radius, hypertree::packing_angle(radius), capacity_lower_bound(dim, radius),
                       capacity_upper_bound(dim, radius)};
  assert(est.lower_bound <= est.upper_bound);
  return est;
}

double packing_angle(double r) {
  require_radius(r);
  return 2.0 * std::asin(1.0 / (2.0 * std::cosh(r / 2.0)));
}

double capacity_lower_bound(int d, double r) {
  require_dim(d);
  require_radius(r);
  using std::numbers::pi;
  if (d == 2) {
    return pi * std::exp(r / 2.0);
  }
  const double dd = d;
  const double growth = std::exp2(1.0 - dd) * std::exp((dd - 1.0) * r / 2.0);
  if (d <= 16) {
    return std::sqrt(2.0 * pi * dd) * growth;
  }
  return std::sqrt(2.0 * pi) * std::log(2.0 / std::sqrt(3.0)) * std::pow(dd, 1.5) * growth;
}

double capacity_upper_bound(int d, double r) {
  require_dim(d);
  require_radius(r);
  if (d == 2) {
    return std::numbers::pi * std::exp(r / 2.0);
  }
  const double dd = d;
  return std::exp2(dd) * std::exp(dd * r / 2.0);
}

namespace {

// Distance from `node` to its k-th nearest other point. Selection runs on the
// monotone excess 2|u-v|^2 / ((1-|u|^2)(1-|v|^2)); only the winner goes
// through arcosh.
double kth_nearest(NodeId node, std::size_t k, const EmbeddingTable& theta,
                   std::span<const double> sq_norms, std::vector<double>& scratch) {
  const std::size_t n = theta.size();
  const std::size_t dim = theta.dim();
  scratch.clear();
  const auto self = theta.row(node);
  const double self_gap = 1.0 - sq_norms[node];
  for (NodeId x = 0; x < n; ++x) {
    if (x == node) {
      continue;
    }
    const auto other = theta.row(x);
    double diff_sq = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double t = self[c] - other[c];
      diff_sq += t * t;
    }
    scratch.push_back(2.0 * diff_sq / (self_gap * (1.0 - sq_norms[x])));
  }
  auto kth = scratch.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(scratch.begin(), kth, scratch.end());
  const double z = std::max(*kth, 0.0);
  return std::log1p(z + std::sqrt(z * (z + 2.0)));
}

std::vector<double> squared_norms(const EmbeddingTable& theta) {
  std::vector<double> out(theta.size());
  for (NodeId n = 0; n < theta.size(); ++n) {
    out[n] = squared_norm(theta.row(n));
  }
  return out;
}

}  // namespace

double node_radius(NodeId node, const EmbeddingTable& theta, const HierarchyGraph& graph) {
  if (graph.num_nodes() < 2) {
    throw InputError("node radius needs at least two nodes");
  }
  if (theta.size() != graph.num_nodes()) {
    throw InputError("embedding table does not cover the graph");
  }
  const std::size_t k = graph.degree(node);
  if (k == 0) {
    return 0.0;
  }
  std::vector<double> scratch;
  scratch.reserve(theta.size());
  return kth_nearest(node, k, theta, squared_norms(theta), scratch);
}

std::vector<CapacityOffender> capacity_check(const EmbeddingTable& theta,
                                             const HierarchyGraph& graph, int d) {
  std::vector<CapacityOffender> offenders;
  if (graph.num_nodes() < 2) {
    return offenders;
  }
  std::vector<double> scratch;
  scratch.reserve(theta.size());
  const auto norms = squared_norms(theta);
  for (NodeId node = 0; node < graph.num_nodes(); ++node) {
    const std::size_t k = graph.degree(node);
    // Both bounds grow with r, so a degree covered at r = 0 is covered everywhere.
    if (k == 0 || static_cast<double>(k) <= capacity_lower_bound(d, 0.0)) {
      continue;
    }
    const double r = kth_nearest(node, k, theta, norms, scratch);
    const double bound = capacity_lower_bound(d, r);
    if (static_cast<double>(k) > bound) {
      offenders.push_back({node, k, r, bound});
    }
  }
  return offenders;
}

}  // namespace hypertree

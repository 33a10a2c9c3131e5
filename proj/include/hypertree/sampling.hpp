#pragma once

#include <random>
#include <vector>

#include "hypertree/graph.hpp"

namespace hypertree {

using Rng = std::mt19937_64;

/// Positive pair (source, target) with its loss weight: 1 for tree edges,
/// eta_tc for closure edges.
struct WeightedEdge {
  NodeId source;
  NodeId target;
  double weight;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

struct Batch {
  std::vector<WeightedEdge> edges;
  std::vector<std::vector<NodeId>> negatives;  // parallel to edges
};

/// Up to m distinct nodes drawn uniformly from V \ ({i, j} U neighbors(i)).
/// Neighbors come from E, or from E U E_tc when `include_closure` is set.
/// When fewer than m nodes are eligible, all of them are returned in id order.
std::vector<NodeId> sample_negatives(const HierarchyGraph& g, NodeId i, NodeId j, int m,
                                     Rng& rng, bool include_closure = false);

/// Shuffles `edges` and cuts them into consecutive chunks of batch_size.
/// Negatives are left empty; see fill_negatives.
std::vector<Batch> make_batches(std::vector<WeightedEdge> edges, int batch_size, Rng& rng);

void fill_negatives(Batch& batch, const HierarchyGraph& g, int m, Rng& rng,
                    bool include_closure = false);

}  // namespace hypertree

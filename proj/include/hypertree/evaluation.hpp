#pragma once

#include <string_view>
#include <vector>

#include "hypertree/embedding.hpp"
#include "hypertree/graph.hpp"

namespace hypertree {

struct MetricsReport {
  double map = 0.0;
  // Mean over nodes of sum_i (|R_{A,B_i}| - i); 0 for a perfect embedding.
  // i is 1 + the number of neighbors strictly closer than B_i.
  double mr_paper = 0.0;
  // Mean over (A, B) pairs of 1 + #non-neighbors strictly closer; 1 when perfect.
  double mr_conventional = 0.0;
};

enum class IllnessCategory { kCapacity, kIntra, kInter };

std::string_view to_string(IllnessCategory c);

struct IllnessCase {
  NodeId source;
  NodeId target;
  NodeId inferred;
  IllnessCategory category;
};

struct IllnessReport {
  std::size_t capacity = 0;
  std::size_t intra = 0;
  std::size_t inter = 0;
  std::vector<IllnessCase> cases;

  std::size_t total() const { return capacity + intra + inter; }
};

/// |R_{a,b}|: one plus the number of other nodes strictly closer to a than b is.
std::size_t rank_set(const EmbeddingTable& theta, NodeId a, NodeId b);

/// MAP and both mean-rank variants over the undirected tree neighborhoods.
/// Throws InputError when some node has no neighbor.
MetricsReport evaluate_reconstruction(const EmbeddingTable& theta, const HierarchyGraph& g);

double map_score(const EmbeddingTable& theta, const HierarchyGraph& g);

/// Returns (mr_paper, mr_conventional).
std::pair<double, double> mean_rank(const EmbeddingTable& theta, const HierarchyGraph& g);

/// Nearest other node; ties go to the smaller id.
NodeId infer_target(const EmbeddingTable& theta, NodeId a);

/// Classifies every non-root node whose nearest neighbor is not its parent.
/// Requires a validated tree.
IllnessReport classify_illness(const EmbeddingTable& theta, const HierarchyGraph& g);

/// Category of a misinferred edge A -> B' when the true target is B.
IllnessCategory classify_case(const HierarchyGraph& g, NodeId target, NodeId inferred);

}  // namespace hypertree

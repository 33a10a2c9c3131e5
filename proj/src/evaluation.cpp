#include "hypertree/evaluation.hpp"

#include <algorithm>
#include <numeric>

#include "hypertree/errors.hpp"
#include "hypertree/geometry.hpp"

namespace hypertree {

std::string_view to_string(IllnessCategory c) {
  switch (c) {
    case IllnessCategory::kCapacity:
      return "capacity";
    case IllnessCategory::kIntra:
      return "intra";
    case IllnessCategory::kInter:
      return "inter";
  }
  return "unknown";
}

std::size_t rank_set(const EmbeddingTable& theta, NodeId a, NodeId b) {
  const auto ta = theta.row(a);
  const double target = poincare_distance(ta, theta.row(b));
  std::size_t closer = 0;
  for (NodeId x = 0; x < theta.size(); ++x) {
    if (x != a && x != b && poincare_distance(ta, theta.row(x)) < target) {
      ++closer;
    }
  }
  return closer + 1;
}

MetricsReport evaluate_reconstruction(const EmbeddingTable& theta, const HierarchyGraph& g) {
  const std::size_t n = g.num_nodes();
  if (theta.size() != n) {
    throw InputError("embedding table does not cover the graph");
  }
  for (NodeId a = 0; a < n; ++a) {
    if (g.degree(a) == 0) {
      throw InputError("node '" + g.label(a) + "' has no neighbors; MAP is undefined");
    }
  }

  std::vector<double> dist(n);
  std::vector<NodeId> nbrs;
  std::vector<double> nbr_dist;
  std::vector<std::size_t> hist;

  double map_sum = 0.0;
  double mr_paper_sum = 0.0;
  double mr_conv_sum = 0.0;
  std::size_t num_pairs = 0;

  for (NodeId a = 0; a < n; ++a) {
    const auto ta = theta.row(a);
    for (NodeId x = 0; x < n; ++x) {
      dist[x] = x == a ? 0.0 : poincare_distance(ta, theta.row(x));
    }
    const auto& adj = g.tree_neighbors(a);
    nbrs.assign(adj.begin(), adj.end());
    std::sort(nbrs.begin(), nbrs.end(), [&](NodeId l, NodeId r) {
      return dist[l] != dist[r] ? dist[l] < dist[r] : l < r;
    });
    const std::size_t deg = nbrs.size();
    nbr_dist.resize(deg);
    for (std::size_t i = 0; i < deg; ++i) {
      nbr_dist[i] = dist[nbrs[i]];
    }

    // hist[p] counts nodes whose distance is below nbr_dist[i] exactly for i >= p.
    hist.assign(deg + 1, 0);
    for (NodeId x = 0; x < n; ++x) {
      if (x == a) {
        continue;
      }
      const auto p = std::upper_bound(nbr_dist.begin(), nbr_dist.end(), dist[x]) -
                     nbr_dist.begin();
      ++hist[static_cast<std::size_t>(p)];
    }

    double precision_sum = 0.0;
    double rank_gap_sum = 0.0;
    std::size_t closer = 0;
    for (std::size_t i = 0; i < deg; ++i) {
      closer += hist[i];
      const auto nbrs_closer = static_cast<std::size_t>(
          std::lower_bound(nbr_dist.begin(), nbr_dist.end(), nbr_dist[i]) - nbr_dist.begin());
      const std::size_t rank = closer + 1;
      precision_sum += static_cast<double>(nbrs_closer + 1) / static_cast<double>(rank);
      // Position of B_i counts tied neighbors as not closer, like the rank.
      rank_gap_sum += static_cast<double>(rank) - static_cast<double>(nbrs_closer + 1);
      mr_conv_sum += static_cast<double>(1 + closer - nbrs_closer);
      ++num_pairs;
    }
    map_sum += precision_sum / static_cast<double>(deg);
    mr_paper_sum += rank_gap_sum;
  }

  MetricsReport report;
  report.map = map_sum / static_cast<double>(n);
  report.mr_paper = mr_paper_sum / static_cast<double>(n);
  report.mr_conventional = mr_conv_sum / static_cast<double>(num_pairs);
  return report;
}

double map_score(const EmbeddingTable& theta, const HierarchyGraph& g) {
  return evaluate_reconstruction(theta, g).map;
}

std::pair<double, double> mean_rank(const EmbeddingTable& theta, const HierarchyGraph& g) {
  const auto r = evaluate_reconstruction(theta, g);
  return {r.mr_paper, r.mr_conventional};
}

NodeId infer_target(const EmbeddingTable& theta, NodeId a) {
  if (theta.size() < 2) {
    throw InputError("nearest-neighbor inference needs at least two nodes");
  }
  const auto ta = theta.row(a);
  NodeId best = a == 0 ? 1 : 0;
  double best_dist = poincare_distance(ta, theta.row(best));
  for (NodeId x = best + 1; x < theta.size(); ++x) {
    if (x == a) {
      continue;
    }
    const double d = poincare_distance(ta, theta.row(x));
    if (d < best_dist) {
      best = x;
      best_dist = d;
    }
  }
  return best;
}

IllnessCategory classify_case(const HierarchyGraph& g, NodeId target, NodeId inferred) {
  if (g.parent(inferred) == target) {
    return IllnessCategory::kCapacity;
  }
  if (g.is_ancestor(target, inferred)) {
    return IllnessCategory::kIntra;
  }
  return IllnessCategory::kInter;
}

IllnessReport classify_illness(const EmbeddingTable& theta, const HierarchyGraph& g) {
  if (!g.is_tree()) {
    throw InputError("illness diagnostics need a tree; supply a backbone tree for this graph");
  }
  if (theta.size() != g.num_nodes()) {
    throw InputError("embedding table does not cover the graph");
  }
  IllnessReport report;
  for (NodeId a = 0; a < g.num_nodes(); ++a) {
    const auto parent = g.parent(a);
    if (!parent) {
      continue;
    }
    const NodeId inferred = infer_target(theta, a);
    if (inferred == *parent) {
      continue;
    }
    const auto category = classify_case(g, *parent, inferred);
    switch (category) {
      case IllnessCategory::kCapacity:
        ++report.capacity;
        break;
      case IllnessCategory::kIntra:
        ++report.intra;
        break;
      case IllnessCategory::kInter:
        ++report.inter;
        break;
    }
    report.cases.push_back({a, *parent, inferred, category});
  }
  return report;
}

}  // namespace hypertree

#include "hypertree/sampling.hpp"

#include <algorithm>

#include "hypertree/errors.hpp"

namespace hypertree {

std::vector<NodeId> sample_negatives(const HierarchyGraph& g, NodeId i, NodeId j, int m,
                                     Rng& rng, bool include_closure) {
  if (m < 1) {
    throw InputError("need at least one negative sample per edge");
  }
  const auto& nbrs = include_closure ? g.all_neighbors(i) : g.tree_neighbors(i);
  const auto excluded = [&](NodeId x) {
    return x == i || x == j || std::binary_search(nbrs.begin(), nbrs.end(), x);
  };

  const std::size_t n = g.num_nodes();
  std::size_t num_excluded = nbrs.size() + 1;
  if (j != i && !std::binary_search(nbrs.begin(), nbrs.end(), j)) {
    ++num_excluded;
  }
  const std::size_t eligible = n > num_excluded ? n - num_excluded : 0;
  const auto want = static_cast<std::size_t>(m);

  std::vector<NodeId> out;
  if (eligible == 0) {
    return out;
  }
  if (eligible <= want) {
    out.reserve(eligible);
    for (NodeId x = 0; x < n; ++x) {
      if (!excluded(x)) {
        out.push_back(x);
      }
    }
    return out;
  }

  if (eligible < 4 * want) {
    // Dense case: partial Fisher-Yates over the eligible list.
    std::vector<NodeId> pool;
    pool.reserve(eligible);
    for (NodeId x = 0; x < n; ++x) {
      if (!excluded(x)) {
        pool.push_back(x);
      }
    }
    for (std::size_t k = 0; k < want; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
      std::swap(pool[k], pool[pick(rng)]);
    }
    pool.resize(want);
    return pool;
  }

  // Sparse case: rejection sampling, at most a quarter of draws are rejected.
  out.reserve(want);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  while (out.size() < want) {
    const NodeId x = pick(rng);
    if (!excluded(x) && std::find(out.begin(), out.end(), x) == out.end()) {
      out.push_back(x);
    }
  }
  return out;
}

std::vector<Batch> make_batches(std::vector<WeightedEdge> edges, int batch_size, Rng& rng) {
  if (edges.empty()) {
    throw InputError("cannot batch an empty edge list");
  }
  if (batch_size < 1) {
    throw InputError("batch size must be >= 1");
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  const auto chunk = static_cast<std::size_t>(batch_size);
  std::vector<Batch> batches;
  batches.reserve((edges.size() + chunk - 1) / chunk);
  for (std::size_t start = 0; start < edges.size(); start += chunk) {
    const auto stop = std::min(edges.size(), start + chunk);
    Batch b;
    b.edges.assign(edges.begin() + static_cast<std::ptrdiff_t>(start),
                   edges.begin() + static_cast<std::ptrdiff_t>(stop));
    batches.push_back(std::move(b));
  }
  return batches;
}

void fill_negatives(Batch& batch, const HierarchyGraph& g, int m, Rng& rng,
                    bool include_closure) {
  batch.negatives.clear();
  batch.negatives.reserve(batch.edges.size());
  for (const auto& e : batch.edges) {
    batch.negatives.push_back(sample_negatives(g, e.source, e.target, m, rng, include_closure));
  }
}

}  // namespace hypertree

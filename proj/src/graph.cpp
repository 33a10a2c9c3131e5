#include "hypertree/graph.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "hypertree/errors.hpp"

namespace hypertree {

namespace {

std::uint64_t edge_key(NodeId child, NodeId parent) {
  return (static_cast<std::uint64_t>(child) << 32) | parent;
}

void insert_sorted(std::vector<NodeId>& list, NodeId value) {
  auto it = std::lower_bound(list.begin(), list.end(), value);
  if (it == list.end() || *it != value) {
    list.insert(it, value);
  }
}

}  // namespace

NodeId HierarchyGraph::add_node(std::string_view label) {
  if (auto it = ids_.find(std::string(label)); it != ids_.end()) {
    return it->second;
  }
  const auto id = static_cast<NodeId>(labels_.size());
  labels_.emplace_back(label);
  ids_.emplace(labels_.back(), id);
  tree_adj_.emplace_back();
  full_adj_.emplace_back();
  root_.reset();
  return id;
}

void HierarchyGraph::add_edge(NodeId child, NodeId parent) {
  require_node(child);
  require_node(parent);
  if (child == parent) {
    throw InputError("self-loop on node '" + labels_[child] + "'");
  }
  if (!edge_set_.insert(edge_key(child, parent)).second) {
    return;
  }
  edges_.push_back({child, parent});
  insert_sorted(tree_adj_[child], parent);
  insert_sorted(tree_adj_[parent], child);
  if (closure_edges_.empty()) {
    insert_sorted(full_adj_[child], parent);
    insert_sorted(full_adj_[parent], child);
  } else {
    clear_closure();
  }
  root_.reset();
}

const std::string& HierarchyGraph::label(NodeId n) const {
  require_node(n);
  return labels_[n];
}

std::optional<NodeId> HierarchyGraph::find(std::string_view label) const {
  if (auto it = ids_.find(std::string(label)); it != ids_.end()) {
    return it->second;
  }
  return std::nullopt;
}

void HierarchyGraph::require_node(NodeId n) const {
  if (n >= labels_.size()) {
    throw InputError("unknown node id " + std::to_string(n));
  }
}

void HierarchyGraph::require_tree() const {
  if (!root_) {
    throw InputError("graph has not been validated as a tree");
  }
}

NodeId HierarchyGraph::root() const {
  require_tree();
  return *root_;
}

NodeId HierarchyGraph::validate_tree() {
  root_.reset();
  const std::size_t n = labels_.size();
  if (n == 0) {
    throw ValidationError("empty graph");
  }
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::vector<NodeId>> children(n);
  for (const Edge& e : edges_) {
    if (parent[e.child] != -1) {
      throw ValidationError("node '" + labels_[e.child] + "' has two parents ('" +
                            labels_[parent[e.child]] + "' and '" + labels_[e.parent] + "')");
    }
    parent[e.child] = e.parent;
    children[e.parent].push_back(e.child);
  }

  std::vector<NodeId> roots;
  for (NodeId v = 0; v < n; ++v) {
    if (parent[v] == -1) {
      roots.push_back(v);
    }
  }
  if (roots.empty()) {
    throw ValidationError("cycle through node '" + labels_[edges_.front().child] + "'");
  }

  // BFS from the first root; anything unreached either hangs off another root
  // or sits on a cycle.
  std::vector<int> depth(n, -1);
  std::vector<NodeId> queue{roots.front()};
  depth[roots.front()] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId v = queue[head];
    for (NodeId c : children[v]) {
      depth[c] = depth[v] + 1;
      queue.push_back(c);
    }
  }
  if (queue.size() != n) {
    for (NodeId v = 0; v < n; ++v) {
      if (depth[v] != -1) {
        continue;
      }
      // Walk parent pointers; n steps without reaching a root means a cycle.
      NodeId walk = v;
      for (std::size_t step = 0; step < n && parent[walk] != -1; ++step) {
        walk = static_cast<NodeId>(parent[walk]);
      }
      if (parent[walk] != -1) {
        throw ValidationError("cycle through node '" + labels_[walk] + "'");
      }
      if (roots.size() > 1) {
        throw ValidationError("multiple roots: '" + labels_[roots[0]] + "' and '" +
                              labels_[walk] + "' (disconnected component at '" + labels_[v] +
                              "')");
      }
      throw ValidationError("node '" + labels_[v] + "' is disconnected from the root");
    }
  }

  parent_index_ = std::move(parent);
  depth_index_ = std::move(depth);
  root_ = roots.front();
  return *root_;
}

std::optional<NodeId> HierarchyGraph::parent(NodeId n) const {
  require_tree();
  require_node(n);
  if (parent_index_[n] < 0) {
    return std::nullopt;
  }
  return static_cast<NodeId>(parent_index_[n]);
}

int HierarchyGraph::depth(NodeId n) const {
  require_tree();
  require_node(n);
  return depth_index_[n];
}

bool HierarchyGraph::is_ancestor(NodeId ancestor, NodeId node) const {
  require_tree();
  require_node(ancestor);
  require_node(node);
  if (depth_index_[ancestor] >= depth_index_[node]) {
    return false;
  }
  NodeId walk = node;
  while (depth_index_[walk] > depth_index_[ancestor]) {
    walk = static_cast<NodeId>(parent_index_[walk]);
  }
  return walk == ancestor;
}

NodeId HierarchyGraph::nearest_common_ancestor(NodeId a, NodeId b) const {
  require_tree();
  require_node(a);
  require_node(b);
  while (depth_index_[a] > depth_index_[b]) {
    a = static_cast<NodeId>(parent_index_[a]);
  }
  while (depth_index_[b] > depth_index_[a]) {
    b = static_cast<NodeId>(parent_index_[b]);
  }
  while (a != b) {
    a = static_cast<NodeId>(parent_index_[a]);
    b = static_cast<NodeId>(parent_index_[b]);
  }
  return a;
}

std::vector<Edge> HierarchyGraph::transitive_closure() const {
  require_tree();
  std::vector<Edge> out;
  for (NodeId u = 0; u < labels_.size(); ++u) {
    if (parent_index_[u] < 0) {
      continue;
    }
    for (auto w = parent_index_[parent_index_[u]]; w >= 0; w = parent_index_[w]) {
      out.push_back({u, static_cast<NodeId>(w)});
    }
  }
  return out;
}

void HierarchyGraph::attach_closure() {
  closure_edges_ = transitive_closure();
  rebuild_full_adjacency();
}

void HierarchyGraph::clear_closure() {
  closure_edges_.clear();
  full_adj_ = tree_adj_;
}

void HierarchyGraph::rebuild_full_adjacency() {
  full_adj_ = tree_adj_;
  for (const Edge& e : closure_edges_) {
    full_adj_[e.child].push_back(e.parent);
    full_adj_[e.parent].push_back(e.child);
  }
  for (auto& list : full_adj_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

const std::vector<NodeId>& HierarchyGraph::tree_neighbors(NodeId n) const {
  require_node(n);
  return tree_adj_[n];
}

const std::vector<NodeId>& HierarchyGraph::all_neighbors(NodeId n) const {
  require_node(n);
  return full_adj_[n];
}

HierarchyGraph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open edge list '" + path.string() + "'");
  }
  HierarchyGraph g;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos || tab == 0 ||
        tab + 1 == line.size()) {
      throw InputError(path.string() + ":" + std::to_string(lineno) +
                       ": expected 'child<TAB>parent'");
    }
    const std::string_view view(line);
    const auto child = view.substr(0, tab);
    const auto parent = view.substr(tab + 1);
    if (child == parent) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": self-loop on '" +
                       std::string(child) + "'");
    }
    const NodeId c = g.add_node(child);
    const NodeId p = g.add_node(parent);
    g.add_edge(c, p);
  }
  return g;
}

void write_edge_list(const std::filesystem::path& path, const HierarchyGraph& g,
                     const std::vector<Edge>& edges) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw InputError("cannot write '" + path.string() + "'");
  }
  for (const Edge& e : edges) {
    out << g.label(e.child) << '\t' << g.label(e.parent) << '\n';
  }
  if (!out) {
    throw InputError("write failed for '" + path.string() + "'");
  }
}

HierarchyGraph generate_balanced_tree(int branching, int levels) {
  if (branching < 1 || levels < 1) {
    throw InputError("balanced tree needs branching >= 1 and levels >= 1");
  }
  HierarchyGraph g;
  std::vector<NodeId> frontier{g.add_node("0")};
  for (int level = 0; level < levels; ++level) {
    std::vector<NodeId> next;
    next.reserve(frontier.size() * static_cast<std::size_t>(branching));
    for (NodeId p : frontier) {
      const std::string prefix = g.label(p) + ".";
      for (int c = 1; c <= branching; ++c) {
        const NodeId child = g.add_node(prefix + std::to_string(c));
        g.add_edge(child, p);
        next.push_back(child);
      }
    }
    frontier = std::move(next);
  }
  return g;
}

}  // namespace hypertree

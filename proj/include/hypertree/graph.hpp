#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hypertree {

using NodeId = std::uint32_t;

/// Directed edge, always child -> parent (or descendant -> ancestor for closure edges).
struct Edge {
  NodeId child;
  NodeId parent;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Node set with string labels, a tree edge set E and an optional closure edge
/// set E_tc. Tree queries (parent, depth, ancestry) are available once
/// validate_tree() has succeeded.
class HierarchyGraph {
 public:
  /// Returns the id of `label`, creating the node on first sight.
  NodeId add_node(std::string_view label);

  /// Set semantics; duplicate edges are ignored. Throws InputError on a
  /// self-loop or an unknown node id. Invalidates a previous tree validation.
  void add_edge(NodeId child, NodeId parent);

  std::size_t num_nodes() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(NodeId n) const;
  std::optional<NodeId> find(std::string_view label) const;

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Edge>& closure_edges() const { return closure_edges_; }

  /// Installs E_tc = transitive_closure(). Requires a validated tree.
  void attach_closure();
  void clear_closure();

  /// Checks the tree invariants, builds the parent and depth indexes and
  /// returns the root. Throws ValidationError naming the offending node.
  NodeId validate_tree();
  bool is_tree() const { return root_.has_value(); }
  NodeId root() const;

  std::optional<NodeId> parent(NodeId n) const;
  int depth(NodeId n) const;
  /// True when `ancestor` is a strict ancestor of `node`.
  bool is_ancestor(NodeId ancestor, NodeId node) const;
  /// Deepest common ancestor-or-self of a and b.
  NodeId nearest_common_ancestor(NodeId a, NodeId b) const;

  /// Every (u, w) with w a strict, non-parent ancestor of u, ordered by (u, depth of w desc).
  std::vector<Edge> transitive_closure() const;

  /// Undirected neighbors in E (sorted).
  const std::vector<NodeId>& tree_neighbors(NodeId n) const;
  /// Undirected neighbors in E union E_tc (sorted).
  const std::vector<NodeId>& all_neighbors(NodeId n) const;
  /// Undirected degree in E.
  std::size_t degree(NodeId n) const { return tree_neighbors(n).size(); }

 private:
  void require_node(NodeId n) const;
  void require_tree() const;
  void rebuild_full_adjacency();

  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> ids_;
  std::vector<Edge> edges_;
  std::vector<Edge> closure_edges_;
  std::unordered_set<std::uint64_t> edge_set_;

  std::optional<NodeId> root_;
  std::vector<std::int64_t> parent_index_;  // -1 for the root
  std::vector<int> depth_index_;

  std::vector<std::vector<NodeId>> tree_adj_;
  std::vector<std::vector<NodeId>> full_adj_;
};

/// Reads "child<TAB>parent" lines. Blank lines and lines starting with '#'
/// are skipped. Node ids follow first appearance.
HierarchyGraph load_edge_list(const std::filesystem::path& path);

void write_edge_list(const std::filesystem::path& path, const HierarchyGraph& g,
                     const std::vector<Edge>& edges);

/// Balanced tree with `branching` children per internal node and `levels`
/// levels below the root. Labels are dotted paths: "0", "0.1", "0.1.3", ...
HierarchyGraph generate_balanced_tree(int branching, int levels);

}  // namespace hypertree

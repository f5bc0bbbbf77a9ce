#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "netiqc/lmi.hpp"

namespace netiqc {

/// Undirected simple graph with sorted neighbor lists.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : adj_(n) {}
  explicit Graph(const SparsityPattern& p);

  int size() const { return static_cast<int>(adj_.size()); }
  void add_edge(int u, int v);
  bool has_edge(int u, int v) const;
  const std::vector<int>& neighbors(int v) const { return adj_.at(v); }
  long edge_count() const;

 private:
  std::vector<std::vector<int>> adj_;
};

/// Maximum cardinality search; returns the reverse visit order, which is a
/// perfect elimination ordering exactly when the graph is chordal.
std::vector<int> mcs_ordering(const Graph& g);

/// True when every vertex's later neighbors (under `order`) form a clique.
bool is_perfect_elimination(const Graph& g, const std::vector<int>& order);

bool is_chordal(const Graph& g);

struct ChordalEmbedding {
  Graph graph;
  std::vector<int> ordering;  // perfect elimination ordering of `graph`
  long fill = 0;              // number of added edges
};

/// Chordal supergraph of the pattern. Chordal inputs keep their edges and get
/// an MCS ordering; otherwise symbolic elimination under minimum degree
/// (ties to the lowest vertex) adds the fill.
ChordalEmbedding chordal_embedding(const SparsityPattern& pattern);
ChordalEmbedding chordal_embedding(const Graph& g);

/// Maximal cliques of a chordal graph from a perfect elimination ordering,
/// each sorted, the list sorted lexicographically. Throws std::invalid_argument
/// when `order` is not a perfect elimination ordering.
std::vector<std::vector<int>> maximal_cliques(const Graph& g, const std::vector<int>& order);

/// Clique tree (forest for reducible patterns). parent[i] = -1 for roots.
struct CliqueTree {
  std::vector<std::vector<int>> cliques;
  std::vector<int> parent;
  std::vector<int> roots;
  std::vector<int> postorder;  // clique indices, children before parents
  bool merge_refused = false;  // merge_cliques was asked for less than the largest clique

  int size() const { return static_cast<int>(cliques.size()); }
  int edge_count() const;
  int max_order() const;
  std::vector<std::vector<int>> children() const;
  /// J_child ∩ J_parent (empty for roots).
  std::vector<int> separator(int child) const;
  /// Position of each clique in `postorder`.
  std::vector<int> postorder_rank() const;

  /// "clique k: v1 v2 ... ; parent: p" per clique (p = -1 for roots).
  void write_report(std::ostream& os) const;
};

/// Maximum-weight spanning forest of the clique intersection graph (Kruskal,
/// ties to the lexicographically smallest clique pair); each component is
/// rooted at the clique holding its lowest vertex.
CliqueTree clique_tree(std::vector<std::vector<int>> cliques);

/// Bottom-up greedy merge: each node, visited in postorder, absorbs its
/// children (smallest separator first, ties by index) while the union has at
/// most `max_order` vertices. Returns the tree unchanged with
/// `merge_refused` set when max_order is below the largest clique.
CliqueTree merge_cliques(const CliqueTree& tree, int max_order);

/// True when, for every vertex, the cliques containing it form a subtree.
bool has_running_intersection(const CliqueTree& tree);

/// Complex-level index set J mapped to its real embedding J ∪ (J + n).
std::vector<int> realify_indices(const std::vector<int>& J, int n);

}  // namespace netiqc

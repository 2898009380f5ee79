#pragma once

// Underlying graphs of conjunctive programs, tree decompositions and
// tree-width, clique-bag normalization and fragment classification.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pdl/expr.hpp"

namespace pdl {

/// Simple undirected graph over variable names. An edge is stored as an
/// ordered pair (a, b) with a <= b; a == b is a self-loop.
struct UGraph {
  std::set<std::string> vertices;
  std::set<std::pair<std::string, std::string>> edges;

  void add_edge(const std::string& a, const std::string& b);
  bool has_edge(const std::string& a, const std::string& b) const;
  bool has_self_loop(const std::string& v) const { return has_edge(v, v); }
  bool operator==(const UGraph&) const = default;
};

/// Edges are vars(A) for each atom A.
UGraph underlying_graph_atoms(const std::vector<Atom>& atoms);
/// underlying_graph_atoms plus the {source, target} edge. `p` must be conjunctive.
UGraph underlying_graph(const Expr& p);

struct TreeDecomposition {
  std::vector<std::set<std::string>> bags;
  /// Undirected tree edges between bag indices.
  std::vector<std::pair<std::size_t, std::size_t>> tree;

  /// max |bag| - 1; bags must be nonempty.
  std::size_t width() const;
  std::vector<std::vector<std::size_t>> adjacency() const;
};

/// Conditions A (vertex cover), B (edge cover), C (connected occurrences),
/// plus: the tree is a tree on the bag indices.
bool validate_decomposition(const UGraph& g, const TreeDecomposition& t);

/// Decomposition induced by eliminating vertices in `order` (a permutation
/// of g.vertices). Width equals the largest higher-neighbourhood size.
TreeDecomposition decomposition_from_ordering(const UGraph& g, const std::vector<std::string>& order);

/// Contracts every bag that is a subset of a neighbour. For connected graphs
/// the result has pairwise-intersecting adjacent bags.
TreeDecomposition normalize(TreeDecomposition t);

inline constexpr std::size_t kExactTreewidthBudget = 16;

struct TreewidthResult {
  std::size_t width = 0;
  TreeDecomposition decomposition;
  /// False when the graph exceeded the exact budget; width is then an upper bound.
  bool exact = true;
};

/// Exact tree-width by dynamic programming over vertex subsets for graphs up
/// to `exact_budget` vertices, min-fill heuristic beyond. Self-loops are
/// ignored. The returned decomposition is normalized. Throws Error on the
/// empty graph.
TreewidthResult exact_treewidth(const UGraph& g, std::size_t exact_budget = kExactTreewidthBudget);

struct CliqueBags {
  Expr program;
  TreeDecomposition decomposition;
};

/// Adds an atom U(z1, z2) for every pair of distinct variables sharing a bag
/// but no atom, with U = (a1 + ... + am + ~a1 + ... + ~am)* over the atomic
/// programs of `p` (eps when there are none). Every bag of the returned
/// decomposition is a clique of underlying_graph(program). Throws
/// FragmentError if the tree-width exceeds `max_width`.
CliqueBags cliqueify(const Expr& p, std::size_t max_width);
/// The universal-reachability program used by cliqueify.
Expr reachability_program(const std::set<std::string>& atomic_names);

struct FragmentReport {
  std::vector<Dialect> dialects;
  /// Absent when the expression has no conjunctive programs.
  std::optional<std::size_t> max_conj_treewidth;
  bool treewidth_exact = true;
  bool in_gloop = true;
  bool in_gcap = true;
  Measures measures;
};

FragmentReport classify_fragment(const Expr& e);
nlohmann::json to_json(const FragmentReport& r);

std::string to_dot(const UGraph& g);
std::string to_dot(const TreeDecomposition& t);

}  // namespace pdl

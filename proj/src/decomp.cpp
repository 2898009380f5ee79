#include "pdl/decomp.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "pdl/error.hpp"

namespace pdl {

void UGraph::add_edge(const std::string& a, const std::string& b) {
  vertices.insert(a);
  vertices.insert(b);
  edges.insert(a <= b ? std::make_pair(a, b) : std::make_pair(b, a));
}

bool UGraph::has_edge(const std::string& a, const std::string& b) const {
  return edges.count(a <= b ? std::make_pair(a, b) : std::make_pair(b, a)) > 0;
}

UGraph underlying_graph_atoms(const std::vector<Atom>& atoms) {
  UGraph g;
  for (const Atom& a : atoms) g.add_edge(a.left, a.right);
  return g;
}

UGraph underlying_graph(const Expr& p) {
  if (p->kind() != Kind::Conjunctive) throw ExprError("underlying graph of a non-conjunctive program");
  UGraph g = underlying_graph_atoms(p->atoms());
  g.add_edge(p->source(), p->target());
  return g;
}

std::size_t TreeDecomposition::width() const {
  std::size_t largest = 0;
  for (const auto& b : bags) largest = std::max(largest, b.size());
  return largest == 0 ? 0 : largest - 1;
}

std::vector<std::vector<std::size_t>> TreeDecomposition::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(bags.size());
  for (auto [a, b] : tree) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

bool validate_decomposition(const UGraph& g, const TreeDecomposition& t) {
  const std::size_t n = t.bags.size();
  if (n == 0 || t.tree.size() != n - 1) return false;
  for (auto [a, b] : t.tree) {
    if (a >= n || b >= n || a == b) return false;
  }
  // n - 1 edges and connected means a tree
  std::vector<std::size_t> root(n);
  std::iota(root.begin(), root.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return root[x] == x ? x : root[x] = find(root[x]);
  };
  for (auto [a, b] : t.tree) {
    if (find(a) == find(b)) return false;
    root[find(a)] = find(b);
  }

  for (const auto& bag : t.bags) {
    for (const auto& v : bag) {
      if (!g.vertices.count(v)) return false;
    }
  }
  // (A) and (C): the bags holding v induce a subtree
  for (const auto& v : g.vertices) {
    std::size_t holders = 0, links = 0;
    for (const auto& bag : t.bags) holders += bag.count(v);
    for (auto [a, b] : t.tree) links += t.bags[a].count(v) && t.bags[b].count(v);
    if (holders == 0 || links != holders - 1) return false;
  }
  // (B)
  for (const auto& [a, b] : g.edges) {
    bool covered = std::any_of(t.bags.begin(), t.bags.end(),
                               [&](const auto& bag) { return bag.count(a) && bag.count(b); });
    if (!covered) return false;
  }
  return true;
}

TreeDecomposition decomposition_from_ordering(const UGraph& g, const std::vector<std::string>& order) {
  if (order.size() != g.vertices.size()) throw Error("elimination ordering is not a permutation");
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  if (pos.size() != order.size()) throw Error("elimination ordering repeats a vertex");

  std::vector<std::set<std::size_t>> adj(order.size());
  for (const auto& [a, b] : g.edges) {
    if (a == b) continue;
    auto ia = pos.at(a), ib = pos.at(b);
    adj[ia].insert(ib);
    adj[ib].insert(ia);
  }

  TreeDecomposition t;
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::vector<std::size_t> higher;
    for (std::size_t j : adj[i]) {
      if (j > i) higher.push_back(j);
    }
    for (std::size_t a : higher) {
      for (std::size_t b : higher) {
        if (a != b) adj[a].insert(b);
      }
    }
    std::set<std::string> bag{order[i]};
    for (std::size_t j : higher) bag.insert(order[j]);
    t.bags.push_back(std::move(bag));
    if (higher.empty()) {
      roots.push_back(i);
    } else {
      t.tree.push_back({i, *std::min_element(higher.begin(), higher.end())});
    }
  }
  // one tree per connected component; chain the component roots together
  for (std::size_t r = 1; r < roots.size(); ++r) t.tree.push_back({roots[r - 1], roots[r]});
  return t;
}

TreeDecomposition normalize(TreeDecomposition t) {
  const std::size_t n = t.bags.size();
  std::vector<std::set<std::size_t>> adj(n);
  for (auto [a, b] : t.tree) {
    adj[a].insert(b);
    adj[b].insert(a);
  }
  std::vector<bool> alive(n, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n && !changed; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j : adj[i]) {
        if (!std::includes(t.bags[j].begin(), t.bags[j].end(), t.bags[i].begin(), t.bags[i].end())) {
          continue;
        }
        for (std::size_t k : adj[i]) {
          if (k == j) continue;
          adj[k].erase(i);
          adj[k].insert(j);
          adj[j].insert(k);
        }
        adj[j].erase(i);
        adj[i].clear();
        alive[i] = false;
        changed = true;
        break;
      }
    }
  }
  std::vector<std::size_t> index(n);
  TreeDecomposition out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    index[i] = out.bags.size();
    out.bags.push_back(std::move(t.bags[i]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : adj[i]) {
      if (alive[i] && i < j) out.tree.push_back({index[i], index[j]});
    }
  }
  return out;
}

namespace {

using Mask = std::uint32_t;

// Vertices outside S + {v} adjacent to the component of v in G[S + {v}].
Mask boundary(Mask s, int v, const std::vector<Mask>& adj) {
  Mask comp = Mask{1} << v;
  Mask frontier = comp;
  while (frontier) {
    Mask next = 0;
    for (Mask f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
    next &= s & ~comp;
    comp |= next;
    frontier = next;
  }
  Mask nb = 0;
  for (Mask c = comp; c; c &= c - 1) nb |= adj[std::countr_zero(c)];
  return nb & ~comp & ~s;
}

std::vector<std::string> exact_ordering(const std::vector<std::string>& names, const std::vector<Mask>& adj) {
  const int n = static_cast<int>(names.size());
  const Mask full = (Mask{1} << n) - 1;
  std::vector<std::int8_t> tw(std::size_t{1} << n, 0);
  std::vector<std::int8_t> choice(std::size_t{1} << n, -1);
  tw[0] = -1;
  for (Mask s = 1; s <= full; ++s) {
    int best = 127;
    for (Mask r = s; r; r &= r - 1) {
      const int v = std::countr_zero(r);
      const Mask rest = s & ~(Mask{1} << v);
      const int cost = std::max<int>(tw[rest], std::popcount(boundary(rest, v, adj)));
      if (cost < best) {
        best = cost;
        choice[s] = static_cast<std::int8_t>(v);
      }
    }
    tw[s] = static_cast<std::int8_t>(best);
  }
  std::vector<std::string> order;
  for (Mask s = full; s; s &= ~(Mask{1} << choice[s])) order.push_back(names[choice[s]]);
  std::reverse(order.begin(), order.end());
  return order;
}

std::vector<std::string> min_fill_ordering(const std::vector<std::string>& names,
                                           std::vector<std::set<std::size_t>> adj) {
  const std::size_t n = names.size();
  std::vector<bool> done(n, false);
  std::vector<std::string> order;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n, best_fill = SIZE_MAX;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v]) continue;
      std::size_t fill = 0;
      for (auto a = adj[v].begin(); a != adj[v].end(); ++a) {
        for (auto b = std::next(a); b != adj[v].end(); ++b) fill += !adj[*a].count(*b);
      }
      if (fill < best_fill) {
        best_fill = fill;
        best = v;
      }
    }
    for (std::size_t a : adj[best]) {
      for (std::size_t b : adj[best]) {
        if (a != b) adj[a].insert(b);
      }
      adj[a].erase(best);
    }
    adj[best].clear();
    done[best] = true;
    order.push_back(names[best]);
  }
  return order;
}

}  // namespace

TreewidthResult exact_treewidth(const UGraph& g, std::size_t exact_budget) {
  if (g.vertices.empty()) throw Error("tree-width of the empty graph");
  const std::vector<std::string> names(g.vertices.begin(), g.vertices.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;

  TreewidthResult result;
  std::vector<std::string> order;
  if (names.size() <= std::min<std::size_t>(exact_budget, 24)) {
    std::vector<Mask> adj(names.size(), 0);
    for (const auto& [a, b] : g.edges) {
      if (a == b) continue;
      adj[index[a]] |= Mask{1} << index[b];
      adj[index[b]] |= Mask{1} << index[a];
    }
    order = exact_ordering(names, adj);
  } else {
    std::vector<std::set<std::size_t>> adj(names.size());
    for (const auto& [a, b] : g.edges) {
      if (a == b) continue;
      adj[index[a]].insert(index[b]);
      adj[index[b]].insert(index[a]);
    }
    order = min_fill_ordering(names, std::move(adj));
    result.exact = false;
  }
  result.decomposition = normalize(decomposition_from_ordering(g, order));
  result.width = result.decomposition.width();
  return result;
}

Expr reachability_program(const std::set<std::string>& atomic_names) {
  if (atomic_names.empty()) return epsilon();
  Expr u;
  auto add = [&](Expr p) { u = u ? choice(u, std::move(p)) : std::move(p); };
  for (const auto& a : atomic_names) add(atomic(a));
  for (const auto& a : atomic_names) add(converse(a));
  return star(u);
}

CliqueBags cliqueify(const Expr& p, std::size_t max_width) {
  const UGraph g = underlying_graph(p);
  TreewidthResult tw = exact_treewidth(g);
  if (tw.width > max_width) {
    throw FragmentError("conjunctive program of tree-width " + std::to_string(tw.width) +
                        " exceeds the bound " + std::to_string(max_width));
  }
  const UGraph atoms_graph = underlying_graph_atoms(p->atoms());
  const Expr u = reachability_program(program_names(p));
  std::vector<Atom> atoms = p->atoms();
  std::set<std::pair<std::string, std::string>> added;
  for (const auto& bag : tw.decomposition.bags) {
    for (auto a = bag.begin(); a != bag.end(); ++a) {
      for (auto b = std::next(a); b != bag.end(); ++b) {
        if (!atoms_graph.has_edge(*a, *b) && added.insert({*a, *b}).second) atoms.push_back({u, *a, *b});
      }
    }
  }
  return {conjunctive(std::move(atoms), p->source(), p->target()), std::move(tw.decomposition)};
}

FragmentReport classify_fragment(const Expr& e) {
  FragmentReport r;
  for (Dialect d : {Dialect::cpdl, Dialect::loop_cpdl, Dialect::icpdl, Dialect::cpdl_plus, Dialect::icpdl_plus}) {
    if (in_dialect(e, d)) r.dialects.push_back(d);
  }
  for (const Expr& s : subexpressions(e)) {
    if (s->kind() != Kind::Conjunctive) continue;
    const UGraph g = underlying_graph(s);
    const TreewidthResult tw = exact_treewidth(g);
    r.max_conj_treewidth = std::max(r.max_conj_treewidth.value_or(0), tw.width);
    r.treewidth_exact = r.treewidth_exact && tw.exact;
    const bool single_loop = g.vertices.size() == 1 && g.edges.size() == 1;
    const bool single_edge = g.vertices.size() == 2 && g.edges.size() == 1;
    r.in_gloop = r.in_gloop && single_loop;
    r.in_gcap = r.in_gcap && single_edge;
  }
  r.measures = measures(e);
  return r;
}

nlohmann::json to_json(const FragmentReport& r) {
  nlohmann::json j;
  j["dialects"] = nlohmann::json::array();
  for (Dialect d : r.dialects) j["dialects"].push_back(dialect_name(d));
  if (r.max_conj_treewidth) {
    j["max_conj_treewidth"] = *r.max_conj_treewidth;
  } else {
    j["max_conj_treewidth"] = "none";
  }
  j["treewidth_exact"] = r.treewidth_exact;
  j["in_Gloop"] = r.in_gloop;
  j["in_Gcap"] = r.in_gcap;
  nlohmann::json m;
  m["cq_width"] = r.measures.cq_width;
  if (r.measures.intersection_width) {
    m["intersection_width"] = *r.measures.intersection_width;
  } else {
    m["intersection_width"] = nullptr;
  }
  m["negation_depth"] = r.measures.negation_depth;
  m["is_positive"] = r.measures.is_positive;
  j["measures"] = m;
  return j;
}

std::string to_dot(const UGraph& g) {
  std::ostringstream out;
  out << "graph ugraph {\n";
  for (const auto& v : g.vertices) out << "  \"" << v << "\";\n";
  for (const auto& [a, b] : g.edges) out << "  \"" << a << "\" -- \"" << b << "\";\n";
  out << "}\n";
  return out.str();
}

std::string to_dot(const TreeDecomposition& t) {
  std::ostringstream out;
  out << "graph decomposition {\n";
  for (std::size_t i = 0; i < t.bags.size(); ++i) {
    out << "  b" << i << " [label=\"{";
    bool first = true;
    for (const auto& v : t.bags[i]) {
      out << (first ? "" : ",") << v;
      first = false;
    }
    out << "}\"];\n";
  }
  for (auto [a, b] : t.tree) out << "  b" << a << " -- b" << b << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace pdl

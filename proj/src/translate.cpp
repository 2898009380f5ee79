#include "pdl/translate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "pdl/decomp.hpp"
#include "pdl/error.hpp"
#include "pdl/syntax.hpp"

namespace pdl {

namespace {

using Rewrite = std::function<Expr(const Expr&)>;

// Rebuilds `e` bottom-up; `node` sees each node with already-rewritten children.
Expr bottom_up(const Expr& e, const Rewrite& node) {
  auto rec = [&](const Expr& c) { return bottom_up(c, node); };
  Expr r;
  switch (e->kind()) {
    case Kind::Prop:
    case Kind::Epsilon:
    case Kind::Atomic:
    case Kind::Converse:
      r = e;
      break;
    case Kind::Not: r = negate(rec(e->first())); break;
    case Kind::And: r = conjoin(rec(e->first()), rec(e->second())); break;
    case Kind::Diamond: r = diamond(rec(e->first())); break;
    case Kind::Loop: r = loop(rec(e->first())); break;
    case Kind::Union: r = choice(rec(e->first()), rec(e->second())); break;
    case Kind::Compose: r = compose(rec(e->first()), rec(e->second())); break;
    case Kind::Star: r = star(rec(e->first())); break;
    case Kind::Test: r = test(rec(e->first())); break;
    case Kind::Intersect: r = intersect(rec(e->first()), rec(e->second())); break;
    case Kind::Conjunctive: {
      std::vector<Atom> atoms;
      for (const Atom& a : e->atoms()) atoms.push_back({rec(a.program), a.left, a.right});
      r = conjunctive(std::move(atoms), e->source(), e->target());
      break;
    }
  }
  return node(r);
}

Expr fold(const std::vector<Expr>& xs, Expr (*op)(Expr, Expr)) {
  Expr acc = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) acc = op(acc, xs[i]);
  return acc;
}

}  // namespace

Expr loop_to_conj(const Expr& e) {
  return bottom_up(e, [](const Expr& n) {
    if (n->kind() != Kind::Loop) return n;
    return diamond(conjunctive({{n->first(), "x", "x"}}, "x", "x"));
  });
}

Expr conj_to_loop(const Expr& e) {
  return bottom_up(e, [](const Expr& n) {
    if (n->kind() != Kind::Conjunctive) return n;
    const std::string& x = n->source();
    const bool self_loop_shape = n->target() == x && std::all_of(n->atoms().begin(), n->atoms().end(), [&](const Atom& a) {
                                   return a.left == x && a.right == x;
                                 });
    if (!self_loop_shape) {
      throw FragmentError("conjunctive program " + render(n) + " is not a single self-loop");
    }
    std::vector<Expr> loops;
    for (const Atom& a : n->atoms()) loops.push_back(loop(a.program));
    return test(fold(loops, conjoin));
  });
}

Expr intersection_to_conj(const Expr& e) {
  return bottom_up(e, [](const Expr& n) {
    if (n->kind() != Kind::Intersect) return n;
    return conjunctive({{n->first(), "x", "y"}, {n->second(), "x", "y"}}, "x", "y");
  });
}

Expr reverse_program(const Expr& p) {
  switch (p->kind()) {
    case Kind::Epsilon:
    case Kind::Test:
      return p;
    case Kind::Atomic: return converse(p->name());
    case Kind::Converse: return atomic(p->name());
    case Kind::Union: return choice(reverse_program(p->second()), reverse_program(p->first()));
    case Kind::Intersect: return intersect(reverse_program(p->second()), reverse_program(p->first()));
    case Kind::Compose: return compose(reverse_program(p->second()), reverse_program(p->first()));
    case Kind::Star: return star(reverse_program(p->first()));
    case Kind::Conjunctive: return conjunctive(p->atoms(), p->target(), p->source());
    default: throw ExprError("reverse_program of a formula");
  }
}

Expr lemita_block(const std::vector<Atom>& atoms, const std::string& x, const std::string& y) {
  const std::set<std::string> vars = variables(atoms);
  if (atoms.empty() || vars.size() > 3) throw FragmentError("atom block must cover one to three variables");
  if (!vars.count(x) || !vars.count(y)) throw FragmentError("block endpoints must occur in the atoms");
  for (const Atom& a : atoms) {
    if (contains_kind(a.program, Kind::Conjunctive)) {
      throw FragmentError("atom program " + render(a.program) + " still contains a conjunctive program");
    }
  }

  auto pair_block = [&](const std::string& z1, const std::string& z2) {
    std::vector<Expr> parts;
    for (const Atom& a : atoms) {
      if (a.left == z1 && a.right == z2) parts.push_back(a.program);
    }
    for (const Atom& a : atoms) {
      if (a.left == z2 && a.right == z1) parts.push_back(reverse_program(a.program));
    }
    if (parts.empty()) throw FragmentError("variables " + z1 + " and " + z2 + " share no atom");
    return fold(parts, intersect);
  };
  auto single_block = [&](const std::string& z) {
    std::vector<Expr> parts;
    for (const Atom& a : atoms) {
      if (a.left == z && a.right == z) parts.push_back(diamond(intersect(a.program, epsilon())));
    }
    return test(parts.empty() ? verum() : fold(parts, conjoin));
  };
  // π_{C[u,v]} for u != v
  auto between = [&](const std::string& u, const std::string& v) {
    Expr middle = pair_block(u, v);
    if (vars.size() == 3) {
      std::string z;
      for (const auto& w : vars) {
        if (w != u && w != v) z = w;
      }
      middle = intersect(middle, compose(compose(pair_block(u, z), single_block(z)), pair_block(z, v)));
    }
    return compose(compose(single_block(u), middle), single_block(v));
  };

  if (x != y) return between(x, y);
  if (vars.size() == 1) return single_block(x);
  std::string other;
  for (const auto& w : vars) {
    if (w != x) {
      other = w;
      break;
    }
  }
  return test(diamond(between(x, other)));
}

namespace {

// Leaf elimination over a clique-bag decomposition of width <= 2.
Expr eliminate_tw2(const Expr& conj) {
  const std::string x = conj->source(), y = conj->target();
  CliqueBags cb;
  try {
    cb = cliqueify(conj, 2);
  } catch (const FragmentError& e) {
    throw FragmentError(std::string(e.what()) + ": " + render(conj));
  }
  const TreeDecomposition& td = cb.decomposition;
  std::vector<Atom> atoms = cb.program->atoms();

  std::size_t root = 0;
  while (!(td.bags[root].count(x) && td.bags[root].count(y))) ++root;
  const auto adj = td.adjacency();
  std::vector<std::size_t> parent(td.bags.size(), SIZE_MAX);
  std::vector<std::size_t> children(td.bags.size(), 0);
  std::vector<std::size_t> bfs{root};
  parent[root] = root;
  for (std::size_t i = 0; i < bfs.size(); ++i) {
    for (std::size_t c : adj[bfs[i]]) {
      if (parent[c] == SIZE_MAX) {
        parent[c] = bfs[i];
        ++children[bfs[i]];
        bfs.push_back(c);
      }
    }
  }

  std::vector<bool> removed(td.bags.size(), false);
  for (std::size_t remaining = td.bags.size(); remaining > 1; --remaining) {
    std::size_t leaf = 0;
    while (leaf == root || removed[leaf] || children[leaf] != 0) ++leaf;
    const auto& bag = td.bags[leaf];
    const auto& up = td.bags[parent[leaf]];
    std::vector<std::string> shared;
    for (const auto& v : bag) {
      if (up.count(v)) shared.push_back(v);
    }

    std::vector<Atom> block, rest;
    for (Atom& a : atoms) {
      (bag.count(a.left) && bag.count(a.right) ? block : rest).push_back(std::move(a));
    }
    if (shared.size() == 1 && bag.size() >= 2) {
      rest.push_back({lemita_block(block, shared[0], shared[0]), shared[0], shared[0]});
    } else if (shared.size() == 2 && bag.size() == 3) {
      rest.push_back({lemita_block(block, shared[0], shared[1]), shared[0], shared[1]});
    } else {
      throw Error("decomposition leaf is neither a cut vertex nor a cut edge");
    }
    atoms = std::move(rest);
    removed[leaf] = true;
    --children[parent[leaf]];
  }
  return lemita_block(atoms, x, y);
}

}  // namespace

Expr tw2_to_icpdl(const Expr& e) {
  return bottom_up(e, [](const Expr& n) {
    if (n->kind() == Kind::Loop) throw FragmentError("loop(...) is outside ICPDL+: " + render(n));
    if (n->kind() != Kind::Conjunctive) return n;
    return eliminate_tw2(n);
  });
}

}  // namespace pdl

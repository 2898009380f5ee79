#pragma once

// Shared fixtures for the test suites: random structures and expressions,
// plus oracles that share no code with the library's evaluators and solvers.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pdl/decomp.hpp"
#include "pdl/expr.hpp"
#include "pdl/kripke.hpp"

namespace pdltest {

using pdl::Expr;
using pdl::Kripke;
using pdl::World;
using Rng = std::mt19937_64;
using Pairs = std::set<std::pair<World, World>>;
using Worlds = std::set<World>;

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

/// Structure with 1..max_worlds worlds named w1.., programs a and b, props p and q.
inline Kripke random_kripke(Rng& rng, std::size_t max_worlds, double edge_density = 0.3, double prop_density = 0.4,
                            std::size_t min_worlds = 1) {
  Kripke k;
  const std::size_t n = min_worlds + pick(rng, max_worlds - min_worlds + 1);
  for (std::size_t i = 0; i < n; ++i) k.add_world("w" + std::to_string(i + 1));
  for (const char* prog : {"a", "b"}) {
    k.declare_program(prog);
    for (World u = 0; u < n; ++u) {
      for (World v = 0; v < n; ++v) {
        if (coin(rng, edge_density)) k.add_edge(prog, u, v);
      }
    }
  }
  for (const char* prop : {"p", "q"}) {
    k.declare_prop(prop);
    for (World w = 0; w < n; ++w) {
      if (coin(rng, prop_density)) k.add_prop(prop, w);
    }
  }
  return k;
}

/// Which constructors the random expression generator may use.
struct Profile {
  bool negation = true;
  bool loop = false;
  bool intersect = false;
  bool conj = false;
  /// Conjunctive programs only of the shape {π1(x,x), ..., πn(x,x)}[x,x].
  bool self_loop_conj_only = false;
  /// Largest tree-width of generated conjunctive programs (2 or 3).
  std::size_t max_conj_tw = 2;
};

Expr random_program(Rng& rng, int depth, const Profile& pr);

inline Expr random_formula(Rng& rng, int depth, const Profile& pr) {
  if (depth <= 1 || coin(rng, 0.2)) return pdl::prop(coin(rng, 0.5) ? "p" : "q");
  std::vector<int> choices{0, 1, 2};  // and, diamond, diamond
  if (pr.negation) choices.push_back(3);
  if (pr.loop) choices.push_back(4);
  switch (choices[pick(rng, choices.size())]) {
    case 0: return pdl::conjoin(random_formula(rng, depth - 1, pr), random_formula(rng, depth - 1, pr));
    case 3: return pdl::negate(random_formula(rng, depth - 1, pr));
    case 4: return pdl::loop(random_program(rng, depth - 1, pr));
    default: return pdl::diamond(random_program(rng, depth - 1, pr));
  }
}

inline Expr random_conjunctive(Rng& rng, int depth, const Profile& pr) {
  const std::vector<std::string> names{"x", "y", "z", "u"};
  if (pr.self_loop_conj_only) {
    std::vector<pdl::Atom> atoms;
    const std::size_t m = 1 + pick(rng, 2);
    for (std::size_t i = 0; i < m; ++i) atoms.push_back({random_program(rng, depth - 1, pr), "x", "x"});
    return pdl::conjunctive(atoms, "x", "x");
  }
  for (;;) {
    const std::size_t nv = 1 + pick(rng, pr.max_conj_tw >= 3 ? 4 : (coin(rng, 0.2) ? 4 : 3));
    std::vector<pdl::Atom> atoms;
    auto program = [&] { return random_program(rng, depth - 1, pr); };
    // spanning tree, then extra atoms (possibly self-loops)
    for (std::size_t v = 1; v < nv; ++v) {
      const std::size_t parent = pick(rng, v);
      if (coin(rng, 0.5)) {
        atoms.push_back({program(), names[parent], names[v]});
      } else {
        atoms.push_back({program(), names[v], names[parent]});
      }
    }
    const std::size_t extra = (nv == 1 ? 1 : 0) + pick(rng, 3);
    for (std::size_t i = 0; i < extra; ++i) atoms.push_back({program(), names[pick(rng, nv)], names[pick(rng, nv)]});
    const Expr c = pdl::conjunctive(atoms, names[pick(rng, nv)], names[pick(rng, nv)]);
    if (pdl::exact_treewidth(pdl::underlying_graph(c)).width <= pr.max_conj_tw) return c;
  }
}

inline Expr random_program(Rng& rng, int depth, const Profile& pr) {
  if (depth <= 1 || coin(rng, 0.15)) {
    switch (pick(rng, 5)) {
      case 0: return pdl::atomic("a");
      case 1: return pdl::atomic("b");
      case 2: return pdl::converse("a");
      case 3: return pdl::converse("b");
      default: return pdl::epsilon();
    }
  }
  std::vector<int> choices{0, 1, 2, 3};  // union, compose, star, test
  if (pr.intersect) choices.push_back(4);
  if (pr.conj) {
    choices.push_back(5);
    choices.push_back(5);
  }
  switch (choices[pick(rng, choices.size())]) {
    case 0: return pdl::choice(random_program(rng, depth - 1, pr), random_program(rng, depth - 1, pr));
    case 1: return pdl::compose(random_program(rng, depth - 1, pr), random_program(rng, depth - 1, pr));
    case 2: return pdl::star(random_program(rng, depth - 1, pr));
    case 3: return pdl::test(random_formula(rng, depth - 1, pr));
    case 4: return pdl::intersect(random_program(rng, depth - 1, pr), random_program(rng, depth - 1, pr));
    default: return random_conjunctive(rng, depth, pr);
  }
}

// ---- reference semantics -------------------------------------------------
// Straight from the set-theoretic definitions, over std::set, with
// conjunctive programs by enumerating every variable assignment.

Pairs ref_program(const Kripke& k, const Expr& p);

inline Worlds ref_formula(const Kripke& k, const Expr& f) {
  Worlds out;
  switch (f->kind()) {
    case pdl::Kind::Prop:
      for (World w = 0; w < k.size(); ++w) {
        if (k.props().count(f->name()) && k.has_prop(f->name(), w)) out.insert(w);
      }
      return out;
    case pdl::Kind::Not: {
      const Worlds in = ref_formula(k, f->first());
      for (World w = 0; w < k.size(); ++w) {
        if (!in.count(w)) out.insert(w);
      }
      return out;
    }
    case pdl::Kind::And: {
      const Worlds l = ref_formula(k, f->first()), r = ref_formula(k, f->second());
      std::set_intersection(l.begin(), l.end(), r.begin(), r.end(), std::inserter(out, out.end()));
      return out;
    }
    case pdl::Kind::Diamond:
      for (const auto& [u, v] : ref_program(k, f->first())) out.insert(u);
      return out;
    case pdl::Kind::Loop:
      for (const auto& [u, v] : ref_program(k, f->first())) {
        if (u == v) out.insert(u);
      }
      return out;
    default:
      throw std::logic_error("ref_formula on a program");
  }
}

inline Pairs ref_edges(const Kripke& k, const std::string& name) {
  return k.programs().count(name) ? k.edges(name) : Pairs{};
}

inline Pairs ref_program(const Kripke& k, const Expr& p) {
  Pairs out;
  const std::size_t n = k.size();
  switch (p->kind()) {
    case pdl::Kind::Epsilon:
      for (World w = 0; w < n; ++w) out.insert({w, w});
      return out;
    case pdl::Kind::Atomic: return ref_edges(k, p->name());
    case pdl::Kind::Converse:
      for (const auto& [u, v] : ref_edges(k, p->name())) out.insert({v, u});
      return out;
    case pdl::Kind::Union: {
      out = ref_program(k, p->first());
      const Pairs r = ref_program(k, p->second());
      out.insert(r.begin(), r.end());
      return out;
    }
    case pdl::Kind::Intersect: {
      const Pairs l = ref_program(k, p->first()), r = ref_program(k, p->second());
      std::set_intersection(l.begin(), l.end(), r.begin(), r.end(), std::inserter(out, out.end()));
      return out;
    }
    case pdl::Kind::Compose: {
      const Pairs l = ref_program(k, p->first()), r = ref_program(k, p->second());
      for (const auto& [u, m] : l) {
        for (const auto& [m2, v] : r) {
          if (m == m2) out.insert({u, v});
        }
      }
      return out;
    }
    case pdl::Kind::Star: {
      const Pairs step = ref_program(k, p->first());
      for (World w = 0; w < n; ++w) out.insert({w, w});
      for (bool grew = true; grew;) {
        grew = false;
        const Pairs cur = out;
        for (const auto& [u, m] : cur) {
          for (const auto& [m2, v] : step) {
            if (m == m2 && out.insert({u, v}).second) grew = true;
          }
        }
      }
      return out;
    }
    case pdl::Kind::Test:
      for (World w : ref_formula(k, p->first())) out.insert({w, w});
      return out;
    case pdl::Kind::Conjunctive: {
      std::vector<std::string> vars;
      for (const auto& v : pdl::variables(p->atoms())) vars.push_back(v);
      std::vector<Pairs> rels;
      for (const auto& a : p->atoms()) rels.push_back(ref_program(k, a.program));
      std::map<std::string, World> f;
      std::function<void(std::size_t)> assign = [&](std::size_t i) {
        if (i == vars.size()) {
          for (std::size_t j = 0; j < rels.size(); ++j) {
            const auto& a = p->atoms()[j];
            if (!rels[j].count({f[a.left], f[a.right]})) return;
          }
          out.insert({f[p->source()], f[p->target()]});
          return;
        }
        for (World w = 0; w < n; ++w) {
          f[vars[i]] = w;
          assign(i + 1);
        }
      };
      if (n > 0) assign(0);
      return out;
    }
    default:
      throw std::logic_error("ref_program on a formula");
  }
}

// ---- brute-force tree-width ----------------------------------------------

/// Minimum over all elimination orders of the largest higher-neighbourhood.
inline std::size_t brute_treewidth(const pdl::UGraph& g) {
  std::vector<std::string> order(g.vertices.begin(), g.vertices.end());
  std::size_t best = SIZE_MAX;
  do {
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& v : order) adj[v];
    for (const auto& [a, b] : g.edges) {
      if (a == b) continue;
      adj[a].insert(b);
      adj[b].insert(a);
    }
    std::size_t width = 0;
    std::set<std::string> gone;
    for (const auto& v : order) {
      std::vector<std::string> later;
      for (const auto& w : adj[v]) {
        if (!gone.count(w)) later.push_back(w);
      }
      width = std::max(width, later.size());
      for (const auto& x : later) {
        for (const auto& y : later) {
          if (x != y) adj[x].insert(y);
        }
      }
      gone.insert(v);
    }
    best = std::min(best, width);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

// ---- brute-force pebble games --------------------------------------------
// Greatest fixpoint over explicit pairs of k-tuples, read off the move rules:
// a pair survives if every Spoiler move has a Duplicator answer that
// survives, and (bisimulation) a collapsed left tuple can be switched.

inline bool ref_hom(const Kripke& l, const Kripke& r, const pdl::WorldTuple& u, const pdl::WorldTuple& v) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (const auto& p : l.props()) {
      if (l.has_prop(p, u[i]) && !r.has_prop(p, v[i])) return false;
    }
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (u[i] == u[j] && v[i] != v[j]) return false;
      for (const auto& a : l.programs()) {
        if (l.has_edge(a, u[i], u[j]) && !r.has_edge(a, v[i], v[j])) return false;
      }
    }
  }
  return true;
}

inline std::vector<World> ref_near(const Kripke& k, World w) {
  std::vector<World> out;
  for (World x = 0; x < k.size(); ++x) {
    bool adjacent = x == w;
    for (const auto& a : k.programs()) adjacent = adjacent || k.has_edge(a, w, x) || k.has_edge(a, x, w);
    if (adjacent) out.push_back(x);
  }
  return out;
}

inline std::vector<pdl::WorldTuple> all_tuples(std::size_t n, std::size_t k) {
  std::vector<pdl::WorldTuple> out;
  pdl::WorldTuple t(k, 0);
  if (n == 0) return out;
  for (;;) {
    out.push_back(t);
    std::size_t i = k;
    while (i > 0 && ++t[i - 1] == n) t[--i] = 0;
    if (i == 0) return out;
  }
}

/// win[(swapped, u, v)] for every valid Spoiler position.
inline std::map<std::tuple<bool, pdl::WorldTuple, pdl::WorldTuple>, bool> ref_game(const Kripke& k1, const Kripke& k2,
                                                                                   std::size_t k, bool bisim) {
  using Key = std::tuple<bool, pdl::WorldTuple, pdl::WorldTuple>;
  std::map<Key, bool> alive;
  for (bool sw : {false, true}) {
    if (sw && !bisim) continue;
    const Kripke& l = sw ? k2 : k1;
    const Kripke& r = sw ? k1 : k2;
    for (const auto& u : all_tuples(l.size(), k)) {
      for (const auto& v : all_tuples(r.size(), k)) {
        if (ref_hom(l, r, u, v)) alive[{sw, u, v}] = true;
      }
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& [key, ok] : alive) {
      if (!ok) continue;
      const auto& [sw, u, v] = key;
      const Kripke& l = sw ? k2 : k1;
      const Kripke& r = sw ? k1 : k2;
      bool survives = true;
      for (std::size_t i = 0; i < k && survives; ++i) {
        std::set<World> spoiler_targets, duplicator_targets;
        for (std::size_t j = 0; j < k; ++j) {
          if (j == i) continue;
          for (World w : ref_near(l, u[j])) spoiler_targets.insert(w);
          for (World w : ref_near(r, v[j])) duplicator_targets.insert(w);
        }
        for (World w : spoiler_targets) {
          auto u2 = u;
          u2[i] = w;
          bool answered = false;
          for (World w2 : duplicator_targets) {
            auto v2 = v;
            v2[i] = w2;
            auto it = alive.find({sw, u2, v2});
            if (it != alive.end() && it->second) {
              answered = true;
              break;
            }
          }
          if (!answered) {
            survives = false;
            break;
          }
        }
      }
      if (survives && bisim && std::all_of(u.begin(), u.end(), [&](World w) { return w == u[0]; })) {
        auto it = alive.find({!sw, v, u});
        survives = it != alive.end() && it->second;
      }
      if (!survives) {
        ok = false;
        changed = true;
      }
    }
  }
  return alive;
}

}  // namespace pdltest

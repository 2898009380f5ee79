#include "pdl/eval.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>

#include "pdl/decomp.hpp"
#include "pdl/error.hpp"

namespace pdl {

// ---- WorldSet / Relation ------------------------------------------------------

WorldSet WorldSet::full(std::size_t n) {
  WorldSet s(n);
  for (auto& w : s.words_) w = ~std::uint64_t{0};
  if (n % 64) s.words_.back() = (std::uint64_t{1} << (n % 64)) - 1;
  return s;
}

std::size_t WorldSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
  return c;
}

bool WorldSet::any() const {
  return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
}

WorldSet& WorldSet::operator|=(const WorldSet& o) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

WorldSet& WorldSet::operator&=(const WorldSet& o) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

WorldSet WorldSet::complement() const {
  WorldSet c = full(n_);
  for (std::size_t i = 0; i < words_.size(); ++i) c.words_[i] &= ~words_[i];
  return c;
}

bool WorldSet::subset_of(const WorldSet& o) const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~o.words_[i]) return false;
  }
  return true;
}

std::vector<World> WorldSet::members() const {
  std::vector<World> out;
  for_each([&](World w) { out.push_back(w); });
  return out;
}

Relation Relation::identity(std::size_t n) {
  Relation r(n);
  for (World w = 0; w < n; ++w) r.set(w, w);
  return r;
}

std::size_t Relation::count() const {
  std::size_t c = 0;
  for (const auto& row : rows_) c += row.count();
  return c;
}

Relation Relation::converse() const {
  Relation r(universe());
  for (World u = 0; u < universe(); ++u) rows_[u].for_each([&](World v) { r.set(v, u); });
  return r;
}

Relation Relation::compose(const Relation& o) const {
  Relation r(universe());
  for (World u = 0; u < universe(); ++u) {
    WorldSet& out = r.rows_[u];
    rows_[u].for_each([&](World v) { out |= o.rows_[v]; });
  }
  return r;
}

Relation& Relation::operator|=(const Relation& o) {
  for (std::size_t i = 0; i < rows_.size(); ++i) rows_[i] |= o.rows_[i];
  return *this;
}

Relation& Relation::operator&=(const Relation& o) {
  for (std::size_t i = 0; i < rows_.size(); ++i) rows_[i] &= o.rows_[i];
  return *this;
}

WorldSet Relation::domain() const {
  WorldSet d(universe());
  for (World u = 0; u < universe(); ++u) {
    if (rows_[u].any()) d.set(u);
  }
  return d;
}

WorldSet Relation::diagonal() const {
  WorldSet d(universe());
  for (World u = 0; u < universe(); ++u) {
    if (rows_[u].test(u)) d.set(u);
  }
  return d;
}

bool Relation::subset_of(const Relation& o) const {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (!rows_[i].subset_of(o.rows_[i])) return false;
  }
  return true;
}

std::set<std::pair<World, World>> Relation::pairs() const {
  std::set<std::pair<World, World>> out;
  for (World u = 0; u < universe(); ++u) rows_[u].for_each([&](World v) { out.insert({u, v}); });
  return out;
}

Relation closure_bfs(const Relation& r) {
  const std::size_t n = r.universe();
  Relation out(n);
  for (World s = 0; s < n; ++s) {
    WorldSet& reach = out.row(s);
    reach.set(s);
    WorldSet frontier(n);
    frontier.set(s);
    while (frontier.any()) {
      WorldSet next(n);
      frontier.for_each([&](World v) { next |= r.row(v); });
      next &= reach.complement();
      reach |= next;
      frontier = std::move(next);
    }
  }
  return out;
}

Relation closure_squaring(const Relation& r) {
  Relation current = r;
  current |= Relation::identity(r.universe());
  while (true) {
    Relation next = current.compose(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

Relation reflexive_transitive_closure(const Relation& r) {
  return r.universe() > 64 ? closure_squaring(r) : closure_bfs(r);
}

// ---- conjunctive programs ------------------------------------------------------

namespace {

struct VarIndex {
  std::vector<std::string> names;
  std::map<std::string, std::size_t> index;
  explicit VarIndex(const Expr& p) {
    for (const auto& v : variables(p->atoms())) {
      index[v] = names.size();
      names.push_back(v);
    }
  }
};

Relation naive_join(const Expr& p, const std::vector<Relation>& rels, std::size_t n) {
  const VarIndex vars(p);
  const std::size_t m = vars.names.size();
  struct Bound {
    std::size_t left, right;
    const Relation* rel;
  };
  // an atom is checked as soon as its later variable is assigned
  std::vector<std::vector<Bound>> checks(m);
  for (std::size_t i = 0; i < p->atoms().size(); ++i) {
    const Atom& a = p->atoms()[i];
    Bound b{vars.index.at(a.left), vars.index.at(a.right), &rels[i]};
    checks[std::max(b.left, b.right)].push_back(b);
  }
  const std::size_t s = vars.index.at(p->source()), t = vars.index.at(p->target());
  Relation out(n);
  std::vector<World> f(m);
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == m) {
      out.set(f[s], f[t]);
      return;
    }
    for (World w = 0; w < n; ++w) {
      f[i] = w;
      bool ok = std::all_of(checks[i].begin(), checks[i].end(),
                            [&](const Bound& b) { return b.rel->test(f[b.left], f[b.right]); });
      if (ok) go(i + 1);
    }
  };
  go(0);
  return out;
}

// Tuples over a separator, indexed for candidate lookup of its last variable.
struct Message {
  std::vector<std::size_t> vars;
  std::vector<std::vector<World>> tuples;
};

class DecompositionJoin {
 public:
  DecompositionJoin(const Expr& p, const std::vector<Relation>& rels, std::size_t n)
      : p_(p), rels_(rels), n_(n), vars_(p), full_(WorldSet::full(n)), empty_(n) {}

  Relation run() {
    const UGraph g = underlying_graph(p_);
    const TreeDecomposition td = exact_treewidth(g).decomposition;
    const std::size_t s = vars_.index.at(p_->source()), t = vars_.index.at(p_->target());

    std::size_t root = 0;
    while (!(td.bags[root].count(p_->source()) && td.bags[root].count(p_->target()))) ++root;

    const auto adj = td.adjacency();
    std::vector<std::size_t> order{root}, parent(td.bags.size(), SIZE_MAX);
    parent[root] = root;
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (std::size_t c : adj[order[i]]) {
        if (parent[c] == SIZE_MAX) {
          parent[c] = order[i];
          order.push_back(c);
        }
      }
    }

    std::vector<std::vector<std::size_t>> bag_vars(td.bags.size());
    for (std::size_t b = 0; b < td.bags.size(); ++b) {
      for (const auto& v : td.bags[b]) bag_vars[b].push_back(vars_.index.at(v));
    }

    std::vector<std::vector<Message>> inbox(td.bags.size());
    Relation out(n_);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t b = *it;
      std::vector<std::size_t> outputs;
      if (b == root) {
        outputs.push_back(s);
        if (t != s) outputs.push_back(t);
      } else {
        for (std::size_t v : bag_vars[b]) {
          if (td.bags[parent[b]].count(vars_.names[v])) outputs.push_back(v);
        }
      }
      Message msg = solve_bag(bag_vars[b], outputs, inbox[b]);
      if (msg.tuples.empty()) return out;  // no satisfying assignment at all
      if (b == root) {
        for (const auto& tup : msg.tuples) out.set(tup[0], tup.size() > 1 ? tup[1] : tup[0]);
      } else {
        inbox[parent[b]].push_back(std::move(msg));
      }
    }
    return out;
  }

 private:
  using Filter = std::function<const WorldSet*(const std::vector<World>&)>;

  const Expr& p_;
  const std::vector<Relation>& rels_;
  std::size_t n_;
  VarIndex vars_;
  WorldSet full_;
  WorldSet empty_;
  std::map<std::size_t, Relation> converses_;
  std::map<std::size_t, WorldSet> diagonals_;
  std::vector<std::unique_ptr<std::map<std::vector<World>, WorldSet>>> indexes_;

  const Relation& converse_of(std::size_t atom) {
    auto it = converses_.find(atom);
    if (it == converses_.end()) it = converses_.emplace(atom, rels_[atom].converse()).first;
    return it->second;
  }
  const WorldSet& diagonal_of(std::size_t atom) {
    auto it = diagonals_.find(atom);
    if (it == diagonals_.end()) it = diagonals_.emplace(atom, rels_[atom].diagonal()).first;
    return it->second;
  }

  // Orders outputs first, then the rest; within each group, prefer the
  // variable most linked to those already placed.
  std::vector<std::size_t> variable_order(const std::vector<std::size_t>& bag,
                                          const std::vector<std::size_t>& outputs) {
    std::vector<std::size_t> placed;
    auto links = [&](std::size_t v) {
      std::size_t c = 0;
      for (const Atom& a : p_->atoms()) {
        const std::size_t l = vars_.index.at(a.left), r = vars_.index.at(a.right);
        for (std::size_t u : placed) c += (l == v && r == u) || (r == v && l == u);
      }
      return c;
    };
    auto place_group = [&](std::vector<std::size_t> group) {
      while (!group.empty()) {
        auto best = std::max_element(group.begin(), group.end(),
                                     [&](std::size_t a, std::size_t b) { return links(a) < links(b); });
        placed.push_back(*best);
        group.erase(best);
      }
    };
    place_group(outputs);
    std::vector<std::size_t> rest;
    for (std::size_t v : bag) {
      if (std::find(outputs.begin(), outputs.end(), v) == outputs.end()) rest.push_back(v);
    }
    place_group(rest);
    return placed;
  }

  Message solve_bag(const std::vector<std::size_t>& bag, const std::vector<std::size_t>& outputs,
                    const std::vector<Message>& inbox) {
    const std::vector<std::size_t> order = variable_order(bag, outputs);
    std::map<std::size_t, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    std::vector<std::vector<Filter>> filters(order.size());

    for (std::size_t i = 0; i < p_->atoms().size(); ++i) {
      const Atom& a = p_->atoms()[i];
      const std::size_t l = vars_.index.at(a.left), r = vars_.index.at(a.right);
      if (!pos.count(l) || !pos.count(r)) continue;
      if (l == r) {
        const WorldSet* d = &diagonal_of(i);
        filters[pos[l]].push_back([d](const std::vector<World>&) { return d; });
      } else if (pos[l] < pos[r]) {
        const Relation* rel = &rels_[i];
        filters[pos[r]].push_back([rel, l](const std::vector<World>& f) { return &rel->row(f[l]); });
      } else {
        const Relation* rel = &converse_of(i);
        filters[pos[l]].push_back([rel, r](const std::vector<World>& f) { return &rel->row(f[r]); });
      }
    }

    for (const Message& m : inbox) {
      if (m.vars.empty()) continue;  // nonempty boolean message: no constraint
      std::vector<std::size_t> sorted = m.vars;
      std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) { return pos.at(a) < pos.at(b); });
      const std::size_t last = sorted.back();
      sorted.pop_back();
      auto index = std::make_unique<std::map<std::vector<World>, WorldSet>>();
      for (const auto& tup : m.tuples) {
        std::vector<World> key;
        World value = 0;
        for (std::size_t k = 0; k < m.vars.size(); ++k) {
          if (m.vars[k] == last) value = tup[k];
        }
        for (std::size_t v : sorted) {
          for (std::size_t k = 0; k < m.vars.size(); ++k) {
            if (m.vars[k] == v) key.push_back(tup[k]);
          }
        }
        auto [it, _] = index->try_emplace(std::move(key), n_);
        it->second.set(value);
      }
      const auto* idx = index.get();
      const WorldSet* empty = &empty_;
      filters[pos.at(last)].push_back([idx, sorted, empty](const std::vector<World>& f) {
        std::vector<World> key;
        for (std::size_t v : sorted) key.push_back(f[v]);
        auto it = idx->find(key);
        return it == idx->end() ? empty : &it->second;
      });
      indexes_.push_back(std::move(index));
    }

    std::vector<World> f(vars_.names.size());
    Message out;
    out.vars = outputs;

    auto candidates = [&](std::size_t i) {
      WorldSet c = full_;
      for (const Filter& flt : filters[i]) c &= *flt(f);
      return c;
    };
    std::function<bool(std::size_t)> complete = [&](std::size_t i) {
      if (i == order.size()) return true;
      bool found = false;
      WorldSet c = candidates(i);
      c.for_each([&](World w) {
        if (found) return;
        f[order[i]] = w;
        found = complete(i + 1);
      });
      return found;
    };
    std::function<void(std::size_t)> enumerate = [&](std::size_t i) {
      if (i == outputs.size()) {
        if (complete(i)) {
          std::vector<World> tup;
          for (std::size_t v : outputs) tup.push_back(f[v]);
          out.tuples.push_back(std::move(tup));
        }
        return;
      }
      WorldSet c = candidates(i);
      c.for_each([&](World w) {
        f[order[i]] = w;
        enumerate(i + 1);
      });
    };
    enumerate(0);
    return out;
  }
};

}  // namespace

Relation eval_conjunctive(const Expr& p, const std::vector<Relation>& atom_relations, ConjStrategy strategy) {
  if (p->kind() != Kind::Conjunctive) throw ExprError("eval_conjunctive on a non-conjunctive program");
  if (atom_relations.size() != p->atoms().size()) throw Error("one relation per atom required");
  const std::size_t n = atom_relations.front().universe();
  if (n == 0) return Relation(0);
  if (strategy == ConjStrategy::naive) return naive_join(p, atom_relations, n);
  return DecompositionJoin(p, atom_relations, n).run();
}

// ---- evaluator ------------------------------------------------------------------

const WorldSet& Evaluator::formula(const Expr& f) {
  if (auto it = formulas_.find(f); it != formulas_.end()) return it->second;
  const std::size_t n = k_.size();
  WorldSet r(n);
  switch (f->kind()) {
    case Kind::Prop:
      for (World w : k_.prop_worlds(f->name())) r.set(w);
      break;
    case Kind::Not:
      r = formula(f->first()).complement();
      break;
    case Kind::And:
      r = formula(f->first());
      r &= formula(f->second());
      break;
    case Kind::Diamond:
      r = program(f->first()).domain();
      break;
    case Kind::Loop:
      r = program(f->first()).diagonal();
      break;
    default:
      throw ExprError("program evaluated as a formula");
  }
  return formulas_.emplace(f, std::move(r)).first->second;
}

const Relation& Evaluator::program(const Expr& p) {
  if (auto it = programs_.find(p); it != programs_.end()) return it->second;
  const std::size_t n = k_.size();
  Relation r(n);
  switch (p->kind()) {
    case Kind::Epsilon:
      r = Relation::identity(n);
      break;
    case Kind::Atomic:
      for (auto [u, v] : k_.edges(p->name())) r.set(u, v);
      break;
    case Kind::Converse:
      for (auto [u, v] : k_.edges(p->name())) r.set(v, u);
      break;
    case Kind::Union:
      r = program(p->first());
      r |= program(p->second());
      break;
    case Kind::Intersect:
      r = program(p->first());
      r &= program(p->second());
      break;
    case Kind::Compose:
      r = program(p->first()).compose(program(p->second()));
      break;
    case Kind::Star:
      r = reflexive_transitive_closure(program(p->first()));
      break;
    case Kind::Test:
      formula(p->first()).for_each([&](World w) { r.set(w, w); });
      break;
    case Kind::Conjunctive: {
      std::vector<Relation> rels;
      for (const Atom& a : p->atoms()) rels.push_back(program(a.program));
      r = eval_conjunctive(p, rels, options_.strategy);
      break;
    }
    default:
      throw ExprError("formula evaluated as a program");
  }
  return programs_.emplace(p, std::move(r)).first->second;
}

EvalResult eval(const Kripke& k, const Expr& e, EvalOptions options) {
  Evaluator ev(k, options);
  if (e->is_formula()) return ev.formula(e);
  return ev.program(e);
}

WorldSet eval_formula(const Kripke& k, const Expr& f, EvalOptions options) {
  return Evaluator(k, options).formula(f);
}

Relation eval_program(const Kripke& k, const Expr& p, EvalOptions options) {
  return Evaluator(k, options).program(p);
}

bool holds(const Kripke& k, World w, const Expr& f, EvalOptions options) {
  if (w >= k.size()) throw ModelError("unknown world index " + std::to_string(w));
  return eval_formula(k, f, options).test(w);
}

// ---- bounded model search -------------------------------------------------------

std::optional<PointedModel> sat_search(const Expr& f, const SatSearchOptions& options) {
  if (!f->is_formula()) throw ExprError("sat_search expects a formula");
  const std::set<std::string> programs = options.programs.empty() ? program_names(f) : options.programs;
  const std::set<std::string> props = options.props.empty() ? proposition_names(f) : options.props;
  for (std::size_t n = std::max<std::size_t>(options.min_worlds, 1); n <= options.max_worlds; ++n) {
    const std::size_t bits = programs.size() * n * n + props.size() * n;
    if (bits > options.max_bits || bits >= 63) {
      throw BudgetExceeded("model search with " + std::to_string(n) + " worlds needs " + std::to_string(bits) +
                           " bits, budget is " + std::to_string(options.max_bits));
    }
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
      Kripke k;
      for (std::size_t i = 1; i <= n; ++i) k.add_world("w" + std::to_string(i));
      std::size_t bit = 0;
      for (const auto& prog : programs) {
        k.declare_program(prog);
        for (World u = 0; u < n; ++u) {
          for (World v = 0; v < n; ++v, ++bit) {
            if ((mask >> bit) & 1U) k.add_edge(prog, u, v);
          }
        }
      }
      for (const auto& p : props) {
        k.declare_prop(p);
        for (World w = 0; w < n; ++w, ++bit) {
          if ((mask >> bit) & 1U) k.add_prop(p, w);
        }
      }
      const WorldSet sat = eval_formula(k, f);
      if (sat.any()) return PointedModel{std::move(k), sat.members().front()};
    }
  }
  return std::nullopt;
}

}  // namespace pdl

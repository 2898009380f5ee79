#include "pdl/expr.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_set>

#include "pdl/error.hpp"

namespace pdl {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Prop: return "Prop";
    case Kind::Not: return "Not";
    case Kind::And: return "And";
    case Kind::Diamond: return "Diamond";
    case Kind::Loop: return "Loop";
    case Kind::Epsilon: return "Epsilon";
    case Kind::Atomic: return "Atomic";
    case Kind::Converse: return "Converse";
    case Kind::Union: return "Union";
    case Kind::Compose: return "Compose";
    case Kind::Star: return "Star";
    case Kind::Test: return "Test";
    case Kind::Intersect: return "Intersect";
    case Kind::Conjunctive: return "Conjunctive";
  }
  return "?";
}

bool is_formula_kind(Kind k) {
  switch (k) {
    case Kind::Prop:
    case Kind::Not:
    case Kind::And:
    case Kind::Diamond:
    case Kind::Loop:
      return true;
    default:
      return false;
  }
}

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

int compare_strings(const std::string& a, const std::string& b) {
  int c = a.compare(b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int compare_atoms(const Atom& a, const Atom& b) {
  if (int c = compare_strings(a.left, b.left)) return c;
  if (int c = compare_strings(a.right, b.right)) return c;
  return compare(a.program, b.program);
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s[0])) return false;
  for (char c : s) {
    if (!alpha(c) && !digit(c)) return false;
  }
  return s != "eps" && s != "loop" && s != "true" && s != "false";
}

void require_identifier(const std::string& s, const char* what) {
  if (!is_identifier(s)) throw ExprError(std::string("invalid ") + what + " name '" + s + "'");
}

void require_formula(const Expr& e, const char* where) {
  if (!e) throw ExprError(std::string(where) + ": null operand");
  if (!e->is_formula()) throw ExprError(std::string(where) + ": expected a formula, got a program");
}

void require_program(const Expr& e, const char* where) {
  if (!e) throw ExprError(std::string(where) + ": null operand");
  if (!e->is_program()) throw ExprError(std::string(where) + ": expected a program, got a formula");
}

}  // namespace

struct NodeFactory {
  static Expr make(Kind kind, std::string name = {}, Expr first = nullptr, Expr second = nullptr,
                   std::vector<Atom> atoms = {}, std::string target = {}) {
    auto node = std::shared_ptr<Node>(new Node());
    node->kind_ = kind;
    node->name_ = std::move(name);
    node->target_ = std::move(target);
    node->first_ = std::move(first);
    node->second_ = std::move(second);
    node->atoms_ = std::move(atoms);

    std::size_t h = std::hash<int>{}(static_cast<int>(kind));
    h = mix(h, std::hash<std::string>{}(node->name_));
    h = mix(h, std::hash<std::string>{}(node->target_));
    if (node->first_) h = mix(h, node->first_->hash());
    if (node->second_) h = mix(h, node->second_->hash());
    for (const Atom& a : node->atoms_) {
      h = mix(h, a.program->hash());
      h = mix(h, std::hash<std::string>{}(a.left));
      h = mix(h, std::hash<std::string>{}(a.right));
    }
    node->hash_ = h;
    return node;
  }
};

Expr prop(std::string name) {
  require_identifier(name, "proposition");
  return NodeFactory::make(Kind::Prop, std::move(name));
}

Expr negate(Expr f) {
  require_formula(f, "!");
  return NodeFactory::make(Kind::Not, {}, std::move(f));
}

Expr conjoin(Expr f, Expr g) {
  require_formula(f, "&");
  require_formula(g, "&");
  return NodeFactory::make(Kind::And, {}, std::move(f), std::move(g));
}

Expr diamond(Expr program) {
  require_program(program, "<>");
  return NodeFactory::make(Kind::Diamond, {}, std::move(program));
}

Expr loop(Expr program) {
  require_program(program, "loop");
  return NodeFactory::make(Kind::Loop, {}, std::move(program));
}

Expr epsilon() { return NodeFactory::make(Kind::Epsilon); }

Expr atomic(std::string name) {
  require_identifier(name, "program");
  return NodeFactory::make(Kind::Atomic, std::move(name));
}

Expr converse(std::string name) {
  require_identifier(name, "program");
  return NodeFactory::make(Kind::Converse, std::move(name));
}

Expr choice(Expr p, Expr q) {
  require_program(p, "+");
  require_program(q, "+");
  return NodeFactory::make(Kind::Union, {}, std::move(p), std::move(q));
}

Expr compose(Expr p, Expr q) {
  require_program(p, ";");
  require_program(q, ";");
  return NodeFactory::make(Kind::Compose, {}, std::move(p), std::move(q));
}

Expr star(Expr p) {
  require_program(p, "*");
  return NodeFactory::make(Kind::Star, {}, std::move(p));
}

Expr test(Expr f) {
  require_formula(f, "?");
  return NodeFactory::make(Kind::Test, {}, std::move(f));
}

Expr intersect(Expr p, Expr q) {
  require_program(p, "&");
  require_program(q, "&");
  return NodeFactory::make(Kind::Intersect, {}, std::move(p), std::move(q));
}

std::set<std::string> variables(const std::vector<Atom>& atoms) {
  std::set<std::string> vars;
  for (const Atom& a : atoms) {
    vars.insert(a.left);
    vars.insert(a.right);
  }
  return vars;
}

Expr conjunctive(std::vector<Atom> atoms, std::string source, std::string target) {
  if (atoms.empty()) throw ExprError("conjunctive program without atoms");
  for (const Atom& a : atoms) {
    require_program(a.program, "atom");
    require_identifier(a.left, "variable");
    require_identifier(a.right, "variable");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return compare_atoms(a, b) < 0; });
  atoms.erase(std::unique(atoms.begin(), atoms.end(),
                          [](const Atom& a, const Atom& b) { return compare_atoms(a, b) == 0; }),
              atoms.end());

  const std::set<std::string> vars = variables(atoms);
  if (!vars.count(source)) throw ExprError("source variable '" + source + "' does not occur in the atoms");
  if (!vars.count(target)) throw ExprError("target variable '" + target + "' does not occur in the atoms");

  // connectedness of the variable graph
  std::map<std::string, std::string> parent;
  for (const auto& v : vars) parent[v] = v;
  std::function<std::string(const std::string&)> find = [&](const std::string& v) {
    std::string& p = parent[v];
    if (p != v) p = find(p);
    return p;
  };
  for (const Atom& a : atoms) parent[find(a.left)] = find(a.right);
  const std::string root = find(*vars.begin());
  for (const auto& v : vars) {
    if (find(v) != root) throw ExprError("conjunctive program is not connected (variable '" + v + "')");
  }
  return NodeFactory::make(Kind::Conjunctive, std::move(source), nullptr, nullptr, std::move(atoms),
                           std::move(target));
}

Expr verum() { return diamond(epsilon()); }
Expr falsum() { return negate(verum()); }
Expr disjoin(Expr f, Expr g) { return negate(conjoin(negate(std::move(f)), negate(std::move(g)))); }

int compare(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind() != b->kind()) return a->kind() < b->kind() ? -1 : 1;
  if (int c = compare_strings(a->name(), b->name())) return c;
  if (int c = compare_strings(a->target(), b->target())) return c;
  if (a->first() || b->first()) {
    if (int c = compare(a->first(), b->first())) return c;
  }
  if (a->second() || b->second()) {
    if (int c = compare(a->second(), b->second())) return c;
  }
  const auto& xs = a->atoms();
  const auto& ys = b->atoms();
  for (std::size_t i = 0; i < std::min(xs.size(), ys.size()); ++i) {
    if (int c = compare_atoms(xs[i], ys[i])) return c;
  }
  if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
  return 0;
}

bool equal(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return true;
  if (a->hash() != b->hash()) return false;
  return compare(a, b) == 0;
}

std::size_t size(const Expr& e) {
  std::size_t n = 1;
  if (e->first()) n += size(e->first());
  if (e->second()) n += size(e->second());
  for (const Atom& a : e->atoms()) n += size(a.program);
  return n;
}

namespace {

template <typename F>
void for_each_child(const Expr& e, F&& f) {
  if (e->first()) f(e->first());
  if (e->second()) f(e->second());
  for (const Atom& a : e->atoms()) f(a.program);
}

void collect_post_order(const Expr& e, std::unordered_set<Expr, ExprHash, ExprEqual>& seen,
                        std::vector<Expr>& out) {
  if (seen.count(e)) return;
  for_each_child(e, [&](const Expr& c) { collect_post_order(c, seen, out); });
  if (seen.insert(e).second) out.push_back(e);
}

}  // namespace

std::vector<Expr> subexpressions(const Expr& e) {
  std::unordered_set<Expr, ExprHash, ExprEqual> seen;
  std::vector<Expr> out;
  collect_post_order(e, seen, out);
  return out;
}

std::set<std::string> program_names(const Expr& e) {
  std::set<std::string> names;
  for (const Expr& s : subexpressions(e)) {
    if (s->kind() == Kind::Atomic || s->kind() == Kind::Converse) names.insert(s->name());
  }
  return names;
}

std::set<std::string> proposition_names(const Expr& e) {
  std::set<std::string> names;
  for (const Expr& s : subexpressions(e)) {
    if (s->kind() == Kind::Prop) names.insert(s->name());
  }
  return names;
}

bool contains_kind(const Expr& e, Kind k) {
  if (e->kind() == k) return true;
  bool found = false;
  for_each_child(e, [&](const Expr& c) { found = found || contains_kind(c, k); });
  return found;
}

std::size_t cq_width_of_program(const Expr& p) {
  switch (p->kind()) {
    case Kind::Epsilon:
    case Kind::Atomic:
    case Kind::Converse:
    case Kind::Test:
      return 1;
    case Kind::Union:
    case Kind::Compose:
      return std::max(cq_width_of_program(p->first()), cq_width_of_program(p->second()));
    case Kind::Star:
      return cq_width_of_program(p->first());
    case Kind::Intersect:
      // an intersection is a two-atom conjunctive program
      return cq_width_of_program(p->first()) + cq_width_of_program(p->second());
    case Kind::Conjunctive: {
      std::size_t sum = 0;
      for (const Atom& a : p->atoms()) sum += cq_width_of_program(a.program);
      return sum;
    }
    default:
      throw ExprError("cq width requested on a formula");
  }
}

std::size_t intersection_width_of_program(const Expr& p) {
  switch (p->kind()) {
    case Kind::Epsilon:
    case Kind::Atomic:
    case Kind::Converse:
    case Kind::Test:
      return 1;
    case Kind::Union:
    case Kind::Compose:
      return std::max(intersection_width_of_program(p->first()),
                      intersection_width_of_program(p->second()));
    case Kind::Star:
      return intersection_width_of_program(p->first());
    case Kind::Intersect:
      return intersection_width_of_program(p->first()) + intersection_width_of_program(p->second());
    case Kind::Conjunctive:
      throw FragmentError("intersection width is undefined for conjunctive programs");
    default:
      throw ExprError("intersection width requested on a formula");
  }
}

namespace {

std::size_t nested_negations(const Expr& e) {
  std::size_t deepest = 0;
  for_each_child(e, [&](const Expr& c) { deepest = std::max(deepest, nested_negations(c)); });
  return deepest + (e->kind() == Kind::Not ? 1 : 0);
}

}  // namespace

Measures measures(const Expr& e) {
  Measures m;
  const bool has_conjunctive = contains_kind(e, Kind::Conjunctive);
  std::size_t iw = 1;
  for (const Expr& s : subexpressions(e)) {
    if (!s->is_program()) continue;
    m.cq_width = std::max(m.cq_width, cq_width_of_program(s));
    if (!has_conjunctive) iw = std::max(iw, intersection_width_of_program(s));
  }
  if (!has_conjunctive) m.intersection_width = iw;
  m.negation_depth = kBaseNegationDepth + nested_negations(e);
  m.is_positive = !contains_kind(e, Kind::Not);
  return m;
}

namespace {

Expr rebuild(const Expr& e, const std::function<Expr(const Expr&)>& child);

Expr normalize_node(const Expr& e) {
  Expr r = rebuild(e, normalize_node);
  if (r->kind() != Kind::Conjunctive) return r;

  // Depth-first numbering from the source; neighbours are visited in the
  // order of their connecting atom's program, which does not depend on names.
  std::map<std::string, std::vector<std::pair<const Atom*, std::string>>> adj;
  for (const Atom& a : r->atoms()) {
    adj[a.left].push_back({&a, a.right});
    if (a.left != a.right) adj[a.right].push_back({&a, a.left});
  }
  for (auto& [v, ns] : adj) {
    std::stable_sort(ns.begin(), ns.end(), [&](const auto& x, const auto& y) {
      if (int c = compare(x.first->program, y.first->program)) return c < 0;
      bool xf = x.first->left == v, yf = y.first->left == v;
      return xf && !yf;
    });
  }
  std::map<std::string, std::string> rename;
  std::vector<std::string> stack{r->source()};
  while (!stack.empty()) {
    std::string v = stack.back();
    stack.pop_back();
    if (rename.count(v)) continue;
    rename[v] = "v" + std::to_string(rename.size());
    auto& ns = adj[v];
    for (auto it = ns.rbegin(); it != ns.rend(); ++it) {
      if (!rename.count(it->second)) stack.push_back(it->second);
    }
  }
  std::vector<Atom> atoms;
  for (const Atom& a : r->atoms()) atoms.push_back({a.program, rename.at(a.left), rename.at(a.right)});
  return conjunctive(std::move(atoms), rename.at(r->source()), rename.at(r->target()));
}

Expr rebuild(const Expr& e, const std::function<Expr(const Expr&)>& child) {
  switch (e->kind()) {
    case Kind::Prop:
    case Kind::Epsilon:
    case Kind::Atomic:
    case Kind::Converse:
      return e;
    case Kind::Not: return negate(child(e->first()));
    case Kind::And: return conjoin(child(e->first()), child(e->second()));
    case Kind::Diamond: return diamond(child(e->first()));
    case Kind::Loop: return loop(child(e->first()));
    case Kind::Union: return choice(child(e->first()), child(e->second()));
    case Kind::Compose: return compose(child(e->first()), child(e->second()));
    case Kind::Star: return star(child(e->first()));
    case Kind::Test: return test(child(e->first()));
    case Kind::Intersect: return intersect(child(e->first()), child(e->second()));
    case Kind::Conjunctive: {
      std::vector<Atom> atoms;
      for (const Atom& a : e->atoms()) atoms.push_back({child(a.program), a.left, a.right});
      return conjunctive(std::move(atoms), e->source(), e->target());
    }
  }
  return e;
}

}  // namespace

Expr alpha_normalize(const Expr& e) { return normalize_node(e); }

std::optional<Dialect> dialect_from_string(const std::string& s) {
  if (s == "cpdl") return Dialect::cpdl;
  if (s == "loop_cpdl" || s == "loop-cpdl") return Dialect::loop_cpdl;
  if (s == "icpdl") return Dialect::icpdl;
  if (s == "cpdl_plus" || s == "cpdl+") return Dialect::cpdl_plus;
  if (s == "icpdl_plus" || s == "icpdl+") return Dialect::icpdl_plus;
  if (s == "any") return Dialect::any;
  return std::nullopt;
}

const char* dialect_name(Dialect d) {
  switch (d) {
    case Dialect::cpdl: return "cpdl";
    case Dialect::loop_cpdl: return "loop_cpdl";
    case Dialect::icpdl: return "icpdl";
    case Dialect::cpdl_plus: return "cpdl_plus";
    case Dialect::icpdl_plus: return "icpdl_plus";
    case Dialect::any: return "any";
  }
  return "?";
}

void check_dialect(const Expr& e, Dialect d) {
  const bool loops = d == Dialect::loop_cpdl || d == Dialect::any;
  const bool intersections = d == Dialect::icpdl || d == Dialect::icpdl_plus || d == Dialect::any;
  const bool conjunctives = d == Dialect::cpdl_plus || d == Dialect::icpdl_plus || d == Dialect::any;
  for (const Expr& s : subexpressions(e)) {
    if (s->kind() == Kind::Loop && !loops) {
      throw ExprError(std::string("loop used outside loop-CPDL (dialect ") + dialect_name(d) + ")");
    }
    if (s->kind() == Kind::Intersect && !intersections) {
      throw ExprError(std::string("program intersection not allowed in dialect ") + dialect_name(d));
    }
    if (s->kind() == Kind::Conjunctive && !conjunctives) {
      throw ExprError(std::string("conjunctive program not allowed in dialect ") + dialect_name(d));
    }
  }
}

bool in_dialect(const Expr& e, Dialect d) {
  try {
    check_dialect(e, d);
    return true;
  } catch (const ExprError&) {
    return false;
  }
}

}  // namespace pdl

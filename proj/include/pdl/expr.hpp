#pragma once

// Abstract syntax for CPDL+ and its relatives (CPDL, loop-CPDL, ICPDL, ICPDL+).
//
// Formulas and programs share one immutable node type. Nodes are built only
// through the factory functions below, which check sorts and the
// well-formedness conditions of conjunctive programs, and are shared through
// `Expr` (a shared pointer to a const node).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pdl {

enum class Kind : std::uint8_t {
  // formulas
  Prop,
  Not,
  And,
  Diamond,
  Loop,
  // programs
  Epsilon,
  Atomic,
  Converse,
  Union,
  Compose,
  Star,
  Test,
  Intersect,
  Conjunctive,
};

const char* kind_name(Kind k);
bool is_formula_kind(Kind k);

class Node;
using Expr = std::shared_ptr<const Node>;

/// `program(left, right)` inside a conjunctive program.
struct Atom {
  Expr program;
  std::string left;
  std::string right;
};

class Node {
 public:
  Kind kind() const { return kind_; }
  bool is_formula() const { return is_formula_kind(kind_); }
  bool is_program() const { return !is_formula(); }

  /// Proposition or atomic-program name (Prop, Atomic, Converse).
  const std::string& name() const { return name_; }
  /// Single child of Not/Diamond/Loop/Star/Test, left child of binary nodes.
  const Expr& first() const { return first_; }
  /// Right child of And/Union/Compose/Intersect.
  const Expr& second() const { return second_; }

  /// Conjunctive programs only. Atoms are kept sorted and free of duplicates.
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::string& source() const { return name_; }
  const std::string& target() const { return target_; }

  std::size_t hash() const { return hash_; }

 private:
  friend struct NodeFactory;
  Node() = default;

  Kind kind_ = Kind::Epsilon;
  std::string name_;
  std::string target_;
  Expr first_;
  Expr second_;
  std::vector<Atom> atoms_;
  std::size_t hash_ = 0;
};

// ---- construction -----------------------------------------------------------

Expr prop(std::string name);
Expr negate(Expr f);
Expr conjoin(Expr f, Expr g);
Expr diamond(Expr program);
Expr loop(Expr program);

Expr epsilon();
Expr atomic(std::string name);
Expr converse(std::string name);
Expr choice(Expr p, Expr q);
Expr compose(Expr p, Expr q);
Expr star(Expr p);
Expr test(Expr f);
Expr intersect(Expr p, Expr q);
/// Throws ExprError unless atoms is nonempty, source/target occur in the
/// atoms, and the variable graph of the atoms is connected.
Expr conjunctive(std::vector<Atom> atoms, std::string source, std::string target);

/// `true` is `<eps>`, `false` is `!<eps>`.
Expr verum();
Expr falsum();
/// Sugar for `!(!f & !g)`.
Expr disjoin(Expr f, Expr g);

// ---- structural comparison --------------------------------------------------

/// Total order on expressions; 0 iff structurally equal.
int compare(const Expr& a, const Expr& b);
bool equal(const Expr& a, const Expr& b);

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e->hash(); }
};
struct ExprEqual {
  bool operator()(const Expr& a, const Expr& b) const { return equal(a, b); }
};
struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

// ---- traversal & measures ---------------------------------------------------

/// Number of AST nodes. A conjunctive program counts one node plus the sizes
/// of its atom programs.
std::size_t size(const Expr& e);

/// The smallest set containing `e` and closed under taking immediate
/// subexpressions (atom programs included). Returned in post-order: every
/// element appears after all of its own subexpressions, duplicates once.
std::vector<Expr> subexpressions(const Expr& e);

std::set<std::string> variables(const std::vector<Atom>& atoms);

/// Names of atomic programs (plain or conversed) and propositions in `e`.
std::set<std::string> program_names(const Expr& e);
std::set<std::string> proposition_names(const Expr& e);

bool contains_kind(const Expr& e, Kind k);

/// Conjunctive width of a program (sum over atoms, max over binary nodes).
std::size_t cq_width_of_program(const Expr& program);
/// Intersection width of an ICPDL program. Throws FragmentError on
/// conjunctive programs.
std::size_t intersection_width_of_program(const Expr& program);

/// Depth assigned to a negation-free expression; each nested `!` adds one.
inline constexpr std::size_t kBaseNegationDepth = 1;

struct Measures {
  std::size_t cq_width = 1;
  /// Absent when the expression contains conjunctive programs.
  std::optional<std::size_t> intersection_width;
  std::size_t negation_depth = kBaseNegationDepth;
  bool is_positive = true;
};

Measures measures(const Expr& e);

/// Renames the variables of every conjunctive program to v0, v1, ... in
/// depth-first order from the source. Alpha-equivalent inputs produced by
/// the same construction compare equal after normalization.
Expr alpha_normalize(const Expr& e);

// ---- dialects ---------------------------------------------------------------

enum class Dialect { cpdl, loop_cpdl, icpdl, cpdl_plus, icpdl_plus, any };

std::optional<Dialect> dialect_from_string(const std::string& s);
const char* dialect_name(Dialect d);

/// Throws ExprError naming the first constructor `d` does not allow.
void check_dialect(const Expr& e, Dialect d);
bool in_dialect(const Expr& e, Dialect d);

}  // namespace pdl

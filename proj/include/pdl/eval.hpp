#pragma once

// Model checking by dynamic programming over subexpressions. Conjunctive
// programs are joined over a tree decomposition of their underlying graph.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pdl/expr.hpp"
#include "pdl/kripke.hpp"

namespace pdl {

/// Fixed-universe bitset over worlds 0..n-1.
class WorldSet {
 public:
  WorldSet() = default;
  explicit WorldSet(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}
  static WorldSet full(std::size_t n);

  std::size_t universe() const { return n_; }
  bool test(World w) const { return (words_[w >> 6] >> (w & 63)) & 1U; }
  void set(World w) { words_[w >> 6] |= std::uint64_t{1} << (w & 63); }
  void reset(World w) { words_[w >> 6] &= ~(std::uint64_t{1} << (w & 63)); }
  std::size_t count() const;
  bool any() const;
  bool none() const { return !any(); }

  WorldSet& operator|=(const WorldSet& o);
  WorldSet& operator&=(const WorldSet& o);
  WorldSet complement() const;
  bool subset_of(const WorldSet& o) const;
  bool operator==(const WorldSet& o) const = default;

  /// Calls f(w) for each member in increasing order.
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      for (std::uint64_t x = words_[i]; x; x &= x - 1) f(World(i * 64 + __builtin_ctzll(x)));
    }
  }
  std::vector<World> members() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Binary relation on worlds as a boolean matrix of rows.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::size_t n) : rows_(n, WorldSet(n)) {}
  static Relation identity(std::size_t n);

  std::size_t universe() const { return rows_.size(); }
  bool test(World u, World v) const { return rows_[u].test(v); }
  void set(World u, World v) { rows_[u].set(v); }
  const WorldSet& row(World u) const { return rows_[u]; }
  WorldSet& row(World u) { return rows_[u]; }
  std::size_t count() const;

  Relation converse() const;
  Relation compose(const Relation& o) const;
  Relation& operator|=(const Relation& o);
  Relation& operator&=(const Relation& o);
  /// {u | some (u, v)}.
  WorldSet domain() const;
  /// {u | (u, u)}.
  WorldSet diagonal() const;
  bool subset_of(const Relation& o) const;
  bool operator==(const Relation& o) const = default;
  std::set<std::pair<World, World>> pairs() const;

 private:
  std::vector<WorldSet> rows_;
};

/// Reflexive-transitive closure by breadth-first search from every source.
Relation closure_bfs(const Relation& r);
/// Reflexive-transitive closure by repeated boolean squaring.
Relation closure_squaring(const Relation& r);
/// Dispatches: squaring above 64 worlds, BFS otherwise.
Relation reflexive_transitive_closure(const Relation& r);

using EvalResult = std::variant<WorldSet, Relation>;

enum class ConjStrategy {
  decomposition,  // join over a tree decomposition of the underlying graph
  naive,          // enumerate every assignment of the variables
};

struct EvalOptions {
  ConjStrategy strategy = ConjStrategy::decomposition;
};

/// {(f(source), f(target)) | f satisfies every atom}, where atom i of `p`
/// denotes atom_relations[i].
Relation eval_conjunctive(const Expr& p, const std::vector<Relation>& atom_relations,
                          ConjStrategy strategy = ConjStrategy::decomposition);

/// Memoizing evaluator; every structurally distinct subexpression is
/// evaluated once per instance. Unknown program/prop names denote ∅.
class Evaluator {
 public:
  explicit Evaluator(const Kripke& k, EvalOptions options = {}) : k_(k), options_(options) {}

  const WorldSet& formula(const Expr& f);
  const Relation& program(const Expr& p);

 private:
  const Kripke& k_;
  EvalOptions options_;
  std::unordered_map<Expr, WorldSet, ExprHash, ExprEqual> formulas_;
  std::unordered_map<Expr, Relation, ExprHash, ExprEqual> programs_;
};

EvalResult eval(const Kripke& k, const Expr& e, EvalOptions options = {});
WorldSet eval_formula(const Kripke& k, const Expr& f, EvalOptions options = {});
Relation eval_program(const Kripke& k, const Expr& p, EvalOptions options = {});
/// Throws ModelError for an unknown world.
bool holds(const Kripke& k, World w, const Expr& f, EvalOptions options = {});

inline constexpr std::size_t kDefaultSatSearchBits = 20;

struct SatSearchOptions {
  std::size_t min_worlds = 1;
  std::size_t max_worlds = 3;
  /// Signature; empty means the names occurring in the formula.
  std::set<std::string> programs;
  std::set<std::string> props;
  /// Largest number of free bits (edges + prop memberships) per world count;
  /// exceeding it throws BudgetExceeded.
  std::size_t max_bits = kDefaultSatSearchBits;
};

struct PointedModel {
  Kripke model;
  World world = 0;
};

/// Smallest-world-count model of `f` over the signature, first in the
/// enumeration order of edge/prop bit vectors. Absence does not certify
/// unsatisfiability.
std::optional<PointedModel> sat_search(const Expr& f, const SatSearchOptions& options);

}  // namespace pdl

#pragma once

// k-pebble simulation and bisimulation games, the S_k power-structure
// reduction to modal simulation, bounded unravellings of tree-width k-1 and
// the clique separation formulas.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdl/decomp.hpp"
#include "pdl/expr.hpp"
#include "pdl/kripke.hpp"

namespace pdl {

enum class GameKind {
  simulation,    // Spoiler moves pebbles on the left structure only
  bisimulation,  // adds the switch move when every left pebble is on one world
};

enum class Owner : std::uint8_t { spoiler, duplicator, sink };

/// Spoiler positions (s, left, right) satisfy is_partial_hom(L, R, left, right)
/// where (L, R) = (K, K') unless `swapped`. A Duplicator position carries the
/// pebble index Spoiler just moved. The sink is the Duplicator dead end
/// reached by a switch whose reversed pair is not a partial homomorphism.
struct GamePosition {
  Owner owner = Owner::spoiler;
  std::size_t pebble = 0;
  bool swapped = false;
  WorldTuple left;
  WorldTuple right;
};

inline constexpr std::size_t kDefaultPositionBudget = 4'000'000;

struct ArenaOptions {
  GameKind kind = GameKind::simulation;
  std::size_t max_positions = kDefaultPositionBudget;
  /// Positions farther than this many moves from every start are created but
  /// not expanded.
  std::optional<std::size_t> max_depth;
};

struct GameArena {
  std::vector<GamePosition> positions;
  std::vector<std::vector<std::size_t>> moves;
  std::vector<bool> expanded;
  /// One entry per requested start; nullopt when the start is not a valid
  /// Spoiler position.
  std::vector<std::optional<std::size_t>> starts;
  bool truncated = false;

  /// Duplicator-owned expanded positions without moves.
  std::vector<std::size_t> dead_ends() const;
};

/// Query-directed arena: only positions reachable from the starts. Throws
/// Error for k < 2 or mismatched dimensions, BudgetExceeded past
/// max_positions.
GameArena build_arena(const Kripke& k1, const Kripke& k2, std::size_t k,
                      const std::vector<std::pair<WorldTuple, WorldTuple>>& starts, const ArenaOptions& options = {});
GameArena build_sim_arena(const Kripke& k1, const Kripke& k2, std::size_t k, const WorldTuple& u,
                          const WorldTuple& v, std::size_t max_positions = kDefaultPositionBudget);

/// Duplicator's winning region: the complement of Spoiler's attractor to the
/// dead ends. Throws Error on a depth-truncated arena.
std::vector<bool> solve_safety(const GameArena& arena);

/// Duplicator can avoid a dead end during the next `plies` moves (each move
/// by either player counts once). Requires plies <= the arena's max_depth
/// when the arena is truncated.
bool survive_rounds(const GameArena& arena, std::size_t start, std::size_t plies);

/// survive_rounds on the implicit arena from (u, v), explored on demand:
/// Duplicator stops at the first surviving answer, so large right-hand
/// structures stay cheap. False when (u, v) is not a partial homomorphism.
/// max_positions bounds the memo table; plies <= 31.
bool survive_rounds_lazy(const Kripke& k1, const Kripke& k2, std::size_t k, const WorldTuple& u, const WorldTuple& v,
                         std::size_t plies, GameKind kind = GameKind::bisimulation,
                         std::size_t max_positions = kDefaultPositionBudget);

/// Repeats the last coordinate until the tuple has dimension k.
WorldTuple pad(const WorldTuple& t, std::size_t k);

/// K', v̄ k-simulates K, ū: the padded pair is a partial homomorphism, ū lies
/// in one connected component of K, and Duplicator wins the simulation game.
bool k_simulates(const Kripke& k1, const WorldTuple& u, const Kripke& k2, const WorldTuple& v, std::size_t k,
                 std::size_t max_positions = kDefaultPositionBudget);
/// As k_simulates, in the bisimulation game.
bool k_half_bisim(const Kripke& k1, const WorldTuple& u, const Kripke& k2, const WorldTuple& v, std::size_t k,
                  std::size_t max_positions = kDefaultPositionBudget);
/// Half-bisimulation in both directions.
bool k_bisim(const Kripke& k1, const WorldTuple& u, const Kripke& k2, const WorldTuple& v, std::size_t k,
             std::size_t max_positions = kDefaultPositionBudget);

/// table[w][w2] = the game verdict for single worlds w of k1 and w2 of k2,
/// computed from one shared arena.
std::vector<std::vector<bool>> k_simulation_table(const Kripke& k1, const Kripke& k2, std::size_t k,
                                                  GameKind kind = GameKind::simulation);

/// S_k(K): worlds are k-tuples (index = base-|W| number, first coordinate most
/// significant, named "(w1,w2,...)"); program "i" moves coordinate i to a
/// world within distance 1 of another coordinate; props "p@i", "a@i,j" and
/// "eq@i,j" (i < j), indices 1-based. Throws BudgetExceeded past max_worlds.
Kripke product_Sk(const Kripke& k, std::size_t arity, std::size_t max_worlds = 1'000'000);
std::size_t tuple_index(const WorldTuple& t, std::size_t worlds);

/// Greatest modal simulation between m1 and m2 (props of m1 preserved,
/// every m1 move matched by an m2 move with the same program name).
std::vector<std::vector<bool>> ml_simulation(const Kripke& m1, const Kripke& m2);
bool ml_simulates(const Kripke& m1, World x, const Kripke& m2, World x2);

/// Undirected graph on world names with one edge per program edge.
UGraph world_graph(const Kripke& k);

inline constexpr std::size_t kDefaultUnravelNodes = 200'000;

struct Unravelling {
  Kripke model;
  World root = 0;
  TreeDecomposition decomposition;
};

/// The tree-width k-1 unravelling of (K, u) cut at sequences of length
/// depth + 1. World [w, v] is named "<w>#<n>" with n its discovery index.
Unravelling unravel(const Kripke& k, World u, std::size_t arity, std::size_t depth,
                    std::size_t max_nodes = kDefaultUnravelNodes);

/// ξ_{k+1} = <C[x1,x_{k+1}]> & !<{a(x1,y), a(y,y)}[x1,y]> with
/// C = {a(xi,xj) | 1 <= i < j <= k+1}.
Expr clique_formula(std::size_t k);

std::string to_dot(const GameArena& arena, const Kripke& k1, const Kripke& k2);

}  // namespace pdl

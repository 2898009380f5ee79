#include "pdl/games.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "pdl/error.hpp"

namespace pdl {

namespace {

// Per-structure tables over a shared program/prop alphabet, so a partial
// homomorphism check is a handful of mask comparisons.
struct Side {
  std::size_t n = 0;
  std::vector<std::vector<World>> near;  // neighbors_within_1, sorted
  std::vector<std::uint64_t> props;      // per world
  std::vector<std::uint64_t> edges;      // per (u, v) at u * n + v
};

struct Alphabet {
  std::map<std::string, std::size_t> programs;
  std::map<std::string, std::size_t> props;
};

Alphabet shared_alphabet(const Kripke& a, const Kripke& b) {
  Alphabet al;
  for (const Kripke* k : {&a, &b}) {
    for (const auto& p : k->programs()) al.programs.emplace(p, al.programs.size());
    for (const auto& p : k->props()) al.props.emplace(p, al.props.size());
  }
  if (al.programs.size() > 64 || al.props.size() > 64) throw Error("games support at most 64 programs and 64 props");
  return al;
}

Side make_side(const Kripke& k, const Alphabet& al) {
  Side s;
  s.n = k.size();
  s.near.resize(s.n);
  s.props.assign(s.n, 0);
  s.edges.assign(s.n * s.n, 0);
  for (World w = 0; w < s.n; ++w) {
    const auto nb = neighbors_within_1(k, w);
    s.near[w].assign(nb.begin(), nb.end());
  }
  for (const auto& p : k.props()) {
    for (World w : k.prop_worlds(p)) s.props[w] |= std::uint64_t{1} << al.props.at(p);
  }
  for (const auto& p : k.programs()) {
    for (const auto& [u, v] : k.edges(p)) s.edges[u * s.n + v] |= std::uint64_t{1} << al.programs.at(p);
  }
  return s;
}

bool fast_hom(const Side& l, const Side& r, const WorldTuple& u, const WorldTuple& v) {
  const std::size_t k = u.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (l.props[u[i]] & ~r.props[v[i]]) return false;
    for (std::size_t j = 0; j < k; ++j) {
      if (u[i] == u[j] && v[i] != v[j]) return false;
      if (l.edges[u[i] * l.n + u[j]] & ~r.edges[v[i] * r.n + v[j]]) return false;
    }
  }
  return true;
}

// The same check when only coordinate i changed since the last valid pair.
bool fast_hom_at(const Side& l, const Side& r, const WorldTuple& u, const WorldTuple& v, std::size_t i) {
  if (l.props[u[i]] & ~r.props[v[i]]) return false;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if ((u[i] == u[j]) && (v[i] != v[j])) return false;
    if (l.edges[u[i] * l.n + u[j]] & ~r.edges[v[i] * r.n + v[j]]) return false;
    if (l.edges[u[j] * l.n + u[i]] & ~r.edges[v[j] * r.n + v[i]]) return false;
  }
  return true;
}

bool connected_tuple(const Kripke& k, const WorldTuple& u) {
  if (u.empty()) return true;
  const auto comp = connected_component(k, u.front());
  return std::all_of(u.begin(), u.end(), [&](World w) { return comp.count(w) > 0; });
}

class ArenaBuilder {
 public:
  ArenaBuilder(const Kripke& k1, const Kripke& k2, std::size_t k, const ArenaOptions& opt)
      : k_(k), opt_(opt), al_(shared_alphabet(k1, k2)), s1_(make_side(k1, al_)), s2_(make_side(k2, al_)) {
    if (k < 2) throw Error("pebble games need k >= 2");
    const std::size_t n = std::max<std::size_t>({s1_.n, s2_.n, 1});
    // key = ((enc(left) * M + enc(right)) * (k + 1) + slot) * 2 + swapped
    radix_ = 1;
    for (std::size_t i = 0; i < k; ++i) {
      if (radix_ > (std::uint64_t{1} << 62) / n) throw BudgetExceeded("arena key space overflows 64 bits");
      radix_ *= n;
    }
    n_ = n;
    const unsigned __int128 space = static_cast<unsigned __int128>(radix_) * radix_ * (k + 1) * 2;
    if (space >= (static_cast<unsigned __int128>(1) << 63)) throw BudgetExceeded("arena key space overflows 64 bits");
  }

  GameArena build(const std::vector<std::pair<WorldTuple, WorldTuple>>& starts) {
    for (const auto& [u, v] : starts) {
      if (u.size() != k_ || v.size() != k_) throw Error("start tuples must have dimension k");
      for (World w : u) {
        if (w >= s1_.n) throw Error("start world out of range");
      }
      for (World w : v) {
        if (w >= s2_.n) throw Error("start world out of range");
      }
      if (!fast_hom(s1_, s2_, u, v)) {
        arena_.starts.push_back(std::nullopt);
        continue;
      }
      GamePosition p{Owner::spoiler, 0, false, u, v};
      arena_.starts.push_back(intern(std::move(p), 0));
    }
    for (std::size_t i = 0; i < arena_.positions.size(); ++i) expand(i);
    return std::move(arena_);
  }

 bool survive_from(const WorldTuple& u, const WorldTuple& v, std::size_t plies) {
    if (u.size() != k_ || v.size() != k_) throw Error("start tuples must have dimension k");
    if (plies > 31) throw Error("bounded game search supports at most 31 plies");
    for (World w : u) {
      if (w >= s1_.n) throw Error("start world out of range");
    }
    for (World w : v) {
      if (w >= s2_.n) throw Error("start world out of range");
    }
    if (!fast_hom(s1_, s2_, u, v)) return false;
    return survives({Owner::spoiler, 0, false, u, v}, plies);
  }

 private:
  std::uint64_t encode(const WorldTuple& t) const {
    std::uint64_t x = 0;
    for (World w : t) x = x * n_ + w;
    return x;
  }

  std::uint64_t key(const GamePosition& p) const {
    if (p.owner == Owner::sink) return UINT64_MAX;
    const std::uint64_t slot = p.owner == Owner::spoiler ? 0 : p.pebble + 1;
    return ((encode(p.left) * radix_ + encode(p.right)) * (k_ + 1) + slot) * 2 + (p.swapped ? 1 : 0);
  }

  std::size_t intern(GamePosition p, std::size_t depth) {
    const std::uint64_t h = key(p);
    auto it = index_.find(h);
    if (it != index_.end()) return it->second;
    if (arena_.positions.size() >= opt_.max_positions) {
      throw BudgetExceeded("game arena exceeds " + std::to_string(opt_.max_positions) + " positions");
    }
    const std::size_t id = arena_.positions.size();
    index_.emplace(h, id);
    arena_.positions.push_back(std::move(p));
    arena_.moves.emplace_back();
    arena_.expanded.push_back(false);
    depth_.push_back(depth);
    return id;
  }

  const Side& left_of(const GamePosition& p) const { return p.swapped ? s2_ : s1_; }
  const Side& right_of(const GamePosition& p) const { return p.swapped ? s1_ : s2_; }

  // Successors in generation order; the sink has none.
  std::vector<GamePosition> successors(const GamePosition& p) const {
    std::vector<GamePosition> out;
    switch (p.owner) {
      case Owner::sink:
        break;
      case Owner::spoiler: {
        const Side& l = left_of(p);
        for (std::size_t i = 0; i < k_; ++i) {
          for (std::size_t j = 0; j < k_; ++j) {
            if (j == i) continue;
            for (World w : l.near[p.left[j]]) {
              GamePosition q{Owner::duplicator, i, p.swapped, p.left, p.right};
              q.left[i] = w;
              out.push_back(std::move(q));
            }
          }
        }
        const bool collapsed = std::all_of(p.left.begin(), p.left.end(), [&](World w) { return w == p.left[0]; });
        if (opt_.kind == GameKind::bisimulation && collapsed) {
          if (fast_hom(right_of(p), left_of(p), p.right, p.left)) {
            out.push_back({Owner::spoiler, 0, !p.swapped, p.right, p.left});
          } else {
            out.push_back({Owner::sink, 0, false, {}, {}});
          }
        }
        break;
      }
      case Owner::duplicator: {
        const Side& l = left_of(p);
        const Side& r = right_of(p);
        const std::size_t i = p.pebble;
        for (std::size_t j = 0; j < k_; ++j) {
          if (j == i) continue;
          for (World w : r.near[p.right[j]]) {
            WorldTuple v = p.right;
            v[i] = w;
            if (!fast_hom_at(l, r, p.left, v, i)) continue;
            out.push_back({Owner::spoiler, 0, p.swapped, p.left, std::move(v)});
          }
        }
        break;
      }
    }
    return out;
  }

  void expand(std::size_t id) {
    if (opt_.max_depth && depth_[id] >= *opt_.max_depth) {
      arena_.truncated = true;
      return;
    }
    const std::size_t d = depth_[id] + 1;
    std::vector<std::size_t> out;
    for (GamePosition& q : successors(arena_.positions[id])) out.push_back(intern(std::move(q), d));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    arena_.moves[id] = std::move(out);
    arena_.expanded[id] = true;
  }

  // Memo bit r: survives r plies; bit 32 + r: does not.
  bool survives(const GamePosition& p, std::size_t plies) {
    if (plies == 0) return true;
    const std::uint64_t h = key(p);
    auto it = memo_.find(h);
    if (it != memo_.end()) {
      if (it->second >> plies & 1) return true;
      if (it->second >> (32 + plies) & 1) return false;
    }
    const auto next = successors(p);
    bool ok;
    if (p.owner == Owner::spoiler) {
      ok = std::all_of(next.begin(), next.end(), [&](const GamePosition& q) { return survives(q, plies - 1); });
    } else {
      ok = std::any_of(next.begin(), next.end(), [&](const GamePosition& q) { return survives(q, plies - 1); });
    }
    if (memo_.size() >= opt_.max_positions) {
      throw BudgetExceeded("bounded game search exceeds " + std::to_string(opt_.max_positions) + " positions");
    }
    memo_[h] |= std::uint64_t{1} << (ok ? plies : 32 + plies);
    return ok;
  }

  std::size_t k_;
  ArenaOptions opt_;
  Alphabet al_;
  Side s1_, s2_;
  std::uint64_t radix_ = 1;
  std::uint64_t n_ = 1;
  GameArena arena_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::vector<std::size_t> depth_;
  std::unordered_map<std::uint64_t, std::uint64_t> memo_;
};

bool game_verdict(const Kripke& k1, const WorldTuple& u, const Kripke& k2, const WorldTuple& v, std::size_t k,
                  GameKind kind, std::size_t max_positions) {
  if (u.empty() || u.size() > k || v.size() != u.size()) throw Error("tuples must have equal dimension 1..k");
  const WorldTuple pu = pad(u, k), pv = pad(v, k);
  if (!is_partial_hom(k1, k2, pu, pv) || !connected_tuple(k1, u)) return false;
  ArenaOptions opt;
  opt.kind = kind;
  opt.max_positions = max_positions;
  const GameArena arena = build_arena(k1, k2, k, {{pu, pv}}, opt);
  return solve_safety(arena)[*arena.starts.front()];
}

}  // namespace

std::vector<std::size_t> GameArena::dead_ends() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (expanded[i] && positions[i].owner != Owner::spoiler && moves[i].empty()) out.push_back(i);
  }
  return out;
}

GameArena build_arena(const Kripke& k1, const Kripke& k2, std::size_t k,
                      const std::vector<std::pair<WorldTuple, WorldTuple>>& starts, const ArenaOptions& options) {
  return ArenaBuilder(k1, k2, k, options).build(starts);
}

GameArena build_sim_arena(const Kripke& k1, const Kripke& k2, std::size_t k, const WorldTuple& u,
                          const WorldTuple& v, std::size_t max_positions) {
  ArenaOptions opt;
  opt.max_positions = max_positions;
  return build_arena(k1, k2, k, {{u, v}}, opt);
}

std::vector<bool> solve_safety(const GameArena& arena) {
  if (arena.truncated) throw Error("cannot solve a depth-truncated arena");
  const std::size_t n = arena.positions.size();
  std::vector<std::vector<std::size_t>> preds(n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q : arena.moves[p]) preds[q].push_back(p);
  }
  // Spoiler attractor to Duplicator dead ends. A Spoiler position joins once
  // one successor is attracted; a Duplicator position once all are.
  std::vector<bool> lost(n, false);
  std::vector<std::size_t> pending(n);
  std::vector<std::size_t> queue;
  for (std::size_t p = 0; p < n; ++p) {
    pending[p] = arena.moves[p].size();
    if (arena.positions[p].owner != Owner::spoiler && pending[p] == 0) {
      lost[p] = true;
      queue.push_back(p);
    }
  }
  while (!queue.empty()) {
    const std::size_t q = queue.back();
    queue.pop_back();
    for (std::size_t p : preds[q]) {
      if (lost[p]) continue;
      if (arena.positions[p].owner == Owner::spoiler || --pending[p] == 0) {
        lost[p] = true;
        queue.push_back(p);
      }
    }
  }
  std::vector<bool> win(n);
  for (std::size_t p = 0; p < n; ++p) win[p] = !lost[p];
  return win;
}

bool survive_rounds(const GameArena& arena, std::size_t start, std::size_t plies) {
  std::map<std::pair<std::size_t, std::size_t>, bool> memo;
  std::function<bool(std::size_t, std::size_t)> go = [&](std::size_t p, std::size_t r) -> bool {
    if (r == 0) return true;
    if (!arena.expanded[p]) throw Error("survive_rounds needs an arena at least as deep as the ply count");
    const auto key = std::make_pair(p, r);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const auto& mv = arena.moves[p];
    bool ok;
    if (arena.positions[p].owner == Owner::spoiler) {
      ok = std::all_of(mv.begin(), mv.end(), [&](std::size_t q) { return go(q, r - 1); });
    } else {
      ok = std::any_of(mv.begin(), mv.end(), [&](std::size_t q) { return go(q, r - 1); });
    }
    memo.emplace(key, ok);
    return ok;
  };
  return go(start, plies);
}

bool survive_rounds_lazy(const Kripke& k1, const Kripke& k2, std::size_t k, const WorldTuple& u, const WorldTuple& v,
                         std::size_t plies, GameKind kind, std::size_t max_positions) {
  ArenaOptions opt;
  opt.kind = kind;
  opt.max_positions = max_positions;
  return ArenaBuilder(k1, k2, k, opt).survive_from(u, v, plies);
}

WorldTuple pad(const WorldTuple& t, std::size_t k) {
  if (t.empty() || t.size() > k) throw Error("cannot pad a tuple of dimension " + std::to_string(t.size()));
  WorldTuple out = t;
  out.resize(k, t.back());
  return out;
}

bool k_simulates(const Kripke& k1, const WorldTuple& u, const Kripke& k2, const WorldTuple& v, std::size_t k,
                 std::size_t max_positions) {
  return game_verdict(k1, u, k2, v, k, GameKind::simulation, max_positions);
}

bool k_half_bisim(const Kripke& k1, const WorldTuple& u, const Kripke& k2, const WorldTuple& v, std::size_t k,
                  std::size_t max_positions) {
  return game_verdict(k1, u, k2, v, k, GameKind::bisimulation, max_positions);
}

bool k_bisim(const Kripke& k1, const WorldTuple& u, const Kripke& k2, const WorldTuple& v, std::size_t k,
             std::size_t max_positions) {
  return k_half_bisim(k1, u, k2, v, k, max_positions) && k_half_bisim(k2, v, k1, u, k, max_positions);
}

std::vector<std::vector<bool>> k_simulation_table(const Kripke& k1, const Kripke& k2, std::size_t k, GameKind kind) {
  std::vector<std::pair<WorldTuple, WorldTuple>> starts;
  for (World w = 0; w < k1.size(); ++w) {
    for (World w2 = 0; w2 < k2.size(); ++w2) starts.push_back({WorldTuple(k, w), WorldTuple(k, w2)});
  }
  ArenaOptions opt;
  opt.kind = kind;
  const GameArena arena = build_arena(k1, k2, k, starts, opt);
  const auto win = solve_safety(arena);
  std::vector<std::vector<bool>> table(k1.size(), std::vector<bool>(k2.size(), false));
  std::size_t s = 0;
  for (World w = 0; w < k1.size(); ++w) {
    for (World w2 = 0; w2 < k2.size(); ++w2, ++s) {
      table[w][w2] = arena.starts[s] && win[*arena.starts[s]];
    }
  }
  return table;
}

std::size_t tuple_index(const WorldTuple& t, std::size_t worlds) {
  std::size_t x = 0;
  for (World w : t) x = x * worlds + w;
  return x;
}

Kripke product_Sk(const Kripke& k, std::size_t arity, std::size_t max_worlds) {
  if (arity < 1) throw Error("S_k needs k >= 1");
  const std::size_t n = k.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < arity; ++i) {
    if (n != 0 && total > max_worlds / n) throw BudgetExceeded("S_k exceeds " + std::to_string(max_worlds) + " worlds");
    total *= n;
  }
  if (n == 0) total = 0;

  Kripke out;
  std::vector<WorldTuple> tuples;
  tuples.reserve(total);
  WorldTuple t(arity, 0);
  for (std::size_t x = 0; x < total; ++x) {
    std::size_t rest = x;
    for (std::size_t i = arity; i-- > 0;) {
      t[i] = rest % n;
      rest /= n;
    }
    std::string name = "(";
    for (std::size_t i = 0; i < arity; ++i) name += (i ? "," : "") + k.name(t[i]);
    out.add_world(name + ")");
    tuples.push_back(t);
  }

  std::vector<std::vector<World>> near(n);
  for (World w = 0; w < n; ++w) {
    const auto nb = neighbors_within_1(k, w);
    near[w].assign(nb.begin(), nb.end());
  }
  for (std::size_t i = 0; i < arity; ++i) out.declare_program(std::to_string(i + 1));
  for (const auto& p : k.props()) {
    for (std::size_t i = 0; i < arity; ++i) out.declare_prop(p + "@" + std::to_string(i + 1));
  }
  for (const auto& a : k.programs()) {
    for (std::size_t i = 0; i < arity; ++i) {
      for (std::size_t j = 0; j < arity; ++j) out.declare_prop(a + "@" + std::to_string(i + 1) + "," + std::to_string(j + 1));
    }
  }
  for (std::size_t i = 0; i < arity; ++i) {
    for (std::size_t j = i + 1; j < arity; ++j) out.declare_prop("eq@" + std::to_string(i + 1) + "," + std::to_string(j + 1));
  }

  for (World x = 0; x < total; ++x) {
    const WorldTuple& u = tuples[x];
    for (std::size_t i = 0; i < arity; ++i) {
      const std::string idx = std::to_string(i + 1);
      for (const auto& p : k.props()) {
        if (k.has_prop(p, u[i])) out.add_prop(p + "@" + idx, x);
      }
      for (const auto& a : k.programs()) {
        for (std::size_t j = 0; j < arity; ++j) {
          if (k.has_edge(a, u[i], u[j])) out.add_prop(a + "@" + idx + "," + std::to_string(j + 1), x);
        }
      }
      for (std::size_t j = i + 1; j < arity; ++j) {
        if (u[i] == u[j]) out.add_prop("eq@" + idx + "," + std::to_string(j + 1), x);
      }
      // successor targets for coordinate i, deduplicated
      std::vector<World> targets;
      for (std::size_t j = 0; j < arity; ++j) {
        if (j == i) continue;
        targets.insert(targets.end(), near[u[j]].begin(), near[u[j]].end());
      }
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      WorldTuple v = u;
      for (World w : targets) {
        v[i] = w;
        out.add_edge(idx, x, tuple_index(v, n));
      }
    }
  }
  return out;
}

std::vector<std::vector<bool>> ml_simulation(const Kripke& m1, const Kripke& m2) {
  const std::size_t n1 = m1.size(), n2 = m2.size();
  std::vector<std::vector<bool>> rel(n1, std::vector<bool>(n2, true));
  for (const auto& p : m1.props()) {
    for (World x : m1.prop_worlds(p)) {
      for (World y = 0; y < n2; ++y) {
        if (!m2.has_prop(p, y)) rel[x][y] = false;
      }
    }
  }
  const auto programs = m1.programs();
  // Refine until every pair satisfies the zig condition.
  for (bool changed = true; changed;) {
    changed = false;
    for (World x = 0; x < n1; ++x) {
      for (World y = 0; y < n2; ++y) {
        if (!rel[x][y]) continue;
        for (const auto& a : programs) {
          const auto& theirs = m2.successors(a, y);
          for (World x1 : m1.successors(a, x)) {
            const bool matched = std::any_of(theirs.begin(), theirs.end(), [&](World y1) { return rel[x1][y1]; });
            if (!matched) {
              rel[x][y] = false;
              changed = true;
              break;
            }
          }
          if (!rel[x][y]) break;
        }
      }
    }
  }
  return rel;
}

bool ml_simulates(const Kripke& m1, World x, const Kripke& m2, World x2) {
  if (x >= m1.size() || x2 >= m2.size()) throw ModelError("world out of range");
  return ml_simulation(m1, m2)[x][x2];
}

UGraph world_graph(const Kripke& k) {
  UGraph g;
  for (World w = 0; w < k.size(); ++w) g.vertices.insert(k.name(w));
  for (const auto& p : k.programs()) {
    for (const auto& [u, v] : k.edges(p)) g.add_edge(k.name(u), k.name(v));
  }
  return g;
}

Unravelling unravel(const Kripke& k, World u, std::size_t arity, std::size_t depth, std::size_t max_nodes) {
  const std::size_t n = k.size();
  if (u >= n) throw ModelError("unravel root out of range");
  if (arity < 1) throw Error("unravel needs k >= 1");

  // Nonempty world sets of size <= k, by size then lexicographically.
  std::vector<std::vector<World>> sets;
  std::function<void(std::vector<World>&, World, std::size_t)> choose = [&](std::vector<World>& cur, World from,
                                                                           std::size_t size) {
    if (cur.size() == size) {
      sets.push_back(cur);
      return;
    }
    for (World w = from; w < n; ++w) {
      cur.push_back(w);
      choose(cur, w + 1, size);
      cur.pop_back();
    }
  };
  for (std::size_t s = 1; s <= std::min(arity, n); ++s) {
    std::vector<World> cur;
    choose(cur, 0, s);
  }

  std::size_t total = 1, level = 1;
  for (std::size_t d = 0; d < depth; ++d) {
    if (level > max_nodes / sets.size()) throw BudgetExceeded("unravelling exceeds " + std::to_string(max_nodes) + " nodes");
    level *= sets.size();
    total += level;
    if (total > max_nodes) throw BudgetExceeded("unravelling exceeds " + std::to_string(max_nodes) + " nodes");
  }

  // Tree nodes in BFS order; node 0 is the root with bag {u}.
  std::vector<const std::vector<World>*> label{nullptr};
  const std::vector<World> root_bag{u};
  label[0] = &root_bag;
  std::vector<std::size_t> parent{0}, node_depth{0};
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (node_depth[i] == depth) continue;
    for (const auto& s : sets) {
      label.push_back(&s);
      parent.push_back(i);
      node_depth.push_back(node_depth[i] + 1);
    }
  }

  // Elements (w, v) with w in λ(v), numbered node by node.
  std::vector<std::size_t> first(label.size() + 1, 0);
  for (std::size_t v = 0; v < label.size(); ++v) first[v + 1] = first[v] + label[v]->size();
  std::vector<std::size_t> uf(first.back());
  std::iota(uf.begin(), uf.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  auto element = [&](std::size_t v, World w) -> std::optional<std::size_t> {
    const auto& bag = *label[v];
    auto it = std::lower_bound(bag.begin(), bag.end(), w);
    if (it == bag.end() || *it != w) return std::nullopt;
    return first[v] + std::size_t(it - bag.begin());
  };
  for (std::size_t v = 1; v < label.size(); ++v) {
    for (World w : *label[v]) {
      if (auto e = element(parent[v], w)) uf[find(*e)] = find(*element(v, w));
    }
  }

  Unravelling out;
  for (const auto& p : k.programs()) out.model.declare_program(p);
  for (const auto& p : k.props()) out.model.declare_prop(p);
  std::unordered_map<std::size_t, World> class_of;
  std::vector<World> world_of(uf.size());
  for (std::size_t v = 0; v < label.size(); ++v) {
    std::set<std::string> bag;
    for (World w : *label[v]) {
      const std::size_t e = *element(v, w);
      auto [it, fresh] = class_of.emplace(find(e), out.model.size());
      if (fresh) {
        out.model.add_world(k.name(w) + "#" + std::to_string(it->second));
        for (const auto& p : k.props()) {
          if (k.has_prop(p, w)) out.model.add_prop(p, it->second);
        }
      }
      world_of[e] = it->second;
      bag.insert(out.model.name(it->second));
    }
    out.decomposition.bags.push_back(std::move(bag));
    if (v != 0) out.decomposition.tree.emplace_back(parent[v], v);
  }
  for (std::size_t v = 0; v < label.size(); ++v) {
    for (World a : *label[v]) {
      for (World b : *label[v]) {
        for (const auto& p : k.programs()) {
          if (k.has_edge(p, a, b)) out.model.add_edge(p, world_of[*element(v, a)], world_of[*element(v, b)]);
        }
      }
    }
  }
  out.root = world_of[0];
  return out;
}

Expr clique_formula(std::size_t k) {
  if (k < 2) throw Error("clique_formula needs k >= 2");
  std::vector<Atom> clique;
  auto var = [](std::size_t i) { return "x" + std::to_string(i); };
  for (std::size_t i = 1; i <= k + 1; ++i) {
    for (std::size_t j = i + 1; j <= k + 1; ++j) clique.push_back({atomic("a"), var(i), var(j)});
  }
  const Expr present = diamond(conjunctive(clique, var(1), var(k + 1)));
  const Expr looped = diamond(conjunctive({{atomic("a"), "x1", "y"}, {atomic("a"), "y", "y"}}, "x1", "y"));
  return conjoin(present, negate(looped));
}

std::string to_dot(const GameArena& arena, const Kripke& k1, const Kripke& k2) {
  std::ostringstream os;
  auto tuple = [](const Kripke& k, const WorldTuple& t) {
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + k.name(t[i]);
    return s;
  };
  os << "digraph arena {\n";
  for (std::size_t i = 0; i < arena.positions.size(); ++i) {
    const GamePosition& p = arena.positions[i];
    os << "  n" << i << " [label=\"";
    if (p.owner == Owner::sink) {
      os << "sink\", shape=box";
    } else {
      const Kripke& l = p.swapped ? k2 : k1;
      const Kripke& r = p.swapped ? k1 : k2;
      os << (p.owner == Owner::spoiler ? "S" : "D" + std::to_string(p.pebble + 1)) << (p.swapped ? "'" : "") << " ("
         << tuple(l, p.left) << " | " << tuple(r, p.right) << ")\"";
      if (p.owner == Owner::duplicator) os << ", shape=box";
    }
    os << "];\n";
  }
  for (std::size_t i = 0; i < arena.positions.size(); ++i) {
    for (std::size_t j : arena.moves[i]) os << "  n" << i << " -> n" << j << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace pdl

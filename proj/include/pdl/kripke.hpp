#pragma once

// Finite Kripke structures. Worlds are addressed by dense indices in
// declaration order; names are kept for I/O.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

namespace pdl {

using World = std::size_t;
using WorldTuple = std::vector<World>;

class Kripke {
 public:
  Kripke() = default;

  /// Returns the index of the new world. Throws ModelError on a duplicate name.
  World add_world(const std::string& name);
  /// Programs and props may be declared with no members. Names are one
  /// namespace: a program may not also be a prop (ModelError).
  void declare_program(const std::string& program);
  void declare_prop(const std::string& prop);
  void add_edge(const std::string& program, World from, World to);
  void add_prop(const std::string& prop, World w);

  std::size_t size() const { return names_.size(); }
  const std::string& name(World w) const { return names_.at(w); }
  /// Throws ModelError for an unknown name.
  World world(const std::string& name) const;
  bool has_world(const std::string& name) const { return index_.count(name) > 0; }

  std::set<std::string> programs() const;
  std::set<std::string> props() const;

  bool has_edge(const std::string& program, World from, World to) const;
  bool has_prop(const std::string& prop, World w) const;
  /// Successors (forward) and predecessors (reverse) under `program`; empty if undeclared.
  const std::vector<World>& successors(const std::string& program, World w) const;
  const std::vector<World>& predecessors(const std::string& program, World w) const;
  /// Sorted edge list; empty if undeclared.
  const std::set<std::pair<World, World>>& edges(const std::string& program) const;
  const std::set<World>& prop_worlds(const std::string& prop) const;

  std::size_t edge_count() const;

  /// Same worlds (by name and order), edges and props.
  bool operator==(const Kripke& other) const;

 private:
  struct Relation {
    std::set<std::pair<World, World>> pairs;
    std::vector<std::vector<World>> forward;
    std::vector<std::vector<World>> reverse;
  };

  std::vector<std::string> names_;
  std::unordered_map<std::string, World> index_;
  std::map<std::string, Relation> relations_;
  std::map<std::string, std::set<World>> props_;
};

/// Schema: {"worlds":[name...], "edges":{prog:[[u,v]...]}, "props":{p:[w...]}}.
Kripke kripke_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Kripke& k);
Kripke load_kripke(const std::string& path);
void store_kripke(const Kripke& k, const std::string& path);

/// w together with every world joined to it by an edge of any program, in either direction.
std::set<World> neighbors_within_1(const Kripke& k, World w);
/// Worlds reachable from w in the underlying undirected graph.
std::set<World> connected_component(const Kripke& k, World w);

/// ū[i] -> v̄[i] is a well-defined map preserving every proposition of `k`
/// and every edge among the coordinates of ū (programs of either structure).
/// Throws Error on a dimension mismatch.
bool is_partial_hom(const Kripke& k, const Kripke& k2, const WorldTuple& u, const WorldTuple& v);

}  // namespace pdl

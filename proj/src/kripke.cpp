#include "pdl/kripke.hpp"

#include <fstream>
#include <queue>

#include "pdl/error.hpp"

namespace pdl {

namespace {
const std::vector<World> kNoWorlds;
const std::set<std::pair<World, World>> kNoPairs;
const std::set<World> kNoSet;
}  // namespace

World Kripke::add_world(const std::string& name) {
  if (index_.count(name)) throw ModelError("duplicate world '" + name + "'");
  const World w = names_.size();
  names_.push_back(name);
  index_[name] = w;
  for (auto& [_, rel] : relations_) {
    rel.forward.emplace_back();
    rel.reverse.emplace_back();
  }
  return w;
}

void Kripke::declare_program(const std::string& program) {
  if (props_.count(program)) throw ModelError("'" + program + "' is already a proposition");
  Relation& rel = relations_[program];
  rel.forward.resize(size());
  rel.reverse.resize(size());
}

void Kripke::declare_prop(const std::string& prop) {
  if (relations_.count(prop)) throw ModelError("'" + prop + "' is already a program");
  props_[prop];
}

void Kripke::add_edge(const std::string& program, World from, World to) {
  if (from >= size() || to >= size()) throw ModelError("edge endpoint is not a world");
  declare_program(program);
  Relation& rel = relations_[program];
  if (!rel.pairs.insert({from, to}).second) return;
  rel.forward[from].push_back(to);
  rel.reverse[to].push_back(from);
}

void Kripke::add_prop(const std::string& prop, World w) {
  if (w >= size()) throw ModelError("proposition member is not a world");
  declare_prop(prop);
  props_[prop].insert(w);
}

World Kripke::world(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ModelError("unknown world '" + name + "'");
  return it->second;
}

std::set<std::string> Kripke::programs() const {
  std::set<std::string> out;
  for (const auto& [name, _] : relations_) out.insert(name);
  return out;
}

std::set<std::string> Kripke::props() const {
  std::set<std::string> out;
  for (const auto& [name, _] : props_) out.insert(name);
  return out;
}

bool Kripke::has_edge(const std::string& program, World from, World to) const {
  auto it = relations_.find(program);
  return it != relations_.end() && it->second.pairs.count({from, to});
}

bool Kripke::has_prop(const std::string& prop, World w) const {
  auto it = props_.find(prop);
  return it != props_.end() && it->second.count(w);
}

const std::vector<World>& Kripke::successors(const std::string& program, World w) const {
  auto it = relations_.find(program);
  return it == relations_.end() ? kNoWorlds : it->second.forward.at(w);
}

const std::vector<World>& Kripke::predecessors(const std::string& program, World w) const {
  auto it = relations_.find(program);
  return it == relations_.end() ? kNoWorlds : it->second.reverse.at(w);
}

const std::set<std::pair<World, World>>& Kripke::edges(const std::string& program) const {
  auto it = relations_.find(program);
  return it == relations_.end() ? kNoPairs : it->second.pairs;
}

const std::set<World>& Kripke::prop_worlds(const std::string& prop) const {
  auto it = props_.find(prop);
  return it == props_.end() ? kNoSet : it->second;
}

std::size_t Kripke::edge_count() const {
  std::size_t n = 0;
  for (const auto& [_, rel] : relations_) n += rel.pairs.size();
  return n;
}

bool Kripke::operator==(const Kripke& other) const {
  if (names_ != other.names_) return false;
  auto nonempty_relations = [](const Kripke& k) {
    std::map<std::string, std::set<std::pair<World, World>>> out;
    for (const auto& [name, rel] : k.relations_) {
      if (!rel.pairs.empty()) out[name] = rel.pairs;
    }
    return out;
  };
  auto nonempty_props = [](const Kripke& k) {
    std::map<std::string, std::set<World>> out;
    for (const auto& [name, ws] : k.props_) {
      if (!ws.empty()) out[name] = ws;
    }
    return out;
  };
  return nonempty_relations(*this) == nonempty_relations(other) && nonempty_props(*this) == nonempty_props(other);
}

Kripke kripke_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw ModelError("model must be a JSON object");
    for (const auto& [key, _] : j.items()) {
      if (key != "worlds" && key != "edges" && key != "props") throw ModelError("unexpected key '" + key + "'");
    }
    Kripke k;
    for (const auto& w : j.at("worlds")) k.add_world(w.get<std::string>());
    if (j.contains("edges")) {
      for (const auto& [prog, pairs] : j.at("edges").items()) {
        if (!pairs.is_array()) throw ModelError("edges of '" + prog + "' must be an array");
        for (const auto& pair : pairs) {
          if (!pair.is_array() || pair.size() != 2) throw ModelError("edge of '" + prog + "' must be a pair");
          k.add_edge(prog, k.world(pair[0].get<std::string>()), k.world(pair[1].get<std::string>()));
        }
        k.declare_program(prog);
      }
    }
    if (j.contains("props")) {
      for (const auto& [p, ws] : j.at("props").items()) {
        if (!ws.is_array()) throw ModelError("worlds of '" + p + "' must be an array");
        k.declare_prop(p);
        for (const auto& w : ws) k.add_prop(p, k.world(w.get<std::string>()));
      }
    }
    return k;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed model JSON: ") + e.what());
  }
}

nlohmann::json to_json(const Kripke& k) {
  nlohmann::json j;
  j["worlds"] = nlohmann::json::array();
  for (World w = 0; w < k.size(); ++w) j["worlds"].push_back(k.name(w));
  j["edges"] = nlohmann::json::object();
  for (const auto& prog : k.programs()) {
    nlohmann::json pairs = nlohmann::json::array();
    for (auto [u, v] : k.edges(prog)) pairs.push_back({k.name(u), k.name(v)});
    j["edges"][prog] = std::move(pairs);
  }
  j["props"] = nlohmann::json::object();
  for (const auto& p : k.props()) {
    nlohmann::json ws = nlohmann::json::array();
    for (World w : k.prop_worlds(p)) ws.push_back(k.name(w));
    j["props"][p] = std::move(ws);
  }
  return j;
}

Kripke load_kripke(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("'" + path + "' is not valid JSON: " + e.what());
  }
  return kripke_from_json(j);
}

void store_kripke(const Kripke& k, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write model file '" + path + "'");
  out << to_json(k).dump(2) << "\n";
}

std::set<World> neighbors_within_1(const Kripke& k, World w) {
  if (w >= k.size()) throw ModelError("unknown world index");
  std::set<World> out{w};
  for (const auto& prog : k.programs()) {
    for (World v : k.successors(prog, w)) out.insert(v);
    for (World v : k.predecessors(prog, w)) out.insert(v);
  }
  return out;
}

std::set<World> connected_component(const Kripke& k, World w) {
  if (w >= k.size()) throw ModelError("unknown world index");
  std::set<World> seen{w};
  std::queue<World> todo;
  todo.push(w);
  while (!todo.empty()) {
    World u = todo.front();
    todo.pop();
    for (World v : neighbors_within_1(k, u)) {
      if (seen.insert(v).second) todo.push(v);
    }
  }
  return seen;
}

bool is_partial_hom(const Kripke& k, const Kripke& k2, const WorldTuple& u, const WorldTuple& v) {
  if (u.size() != v.size()) throw Error("partial homomorphism check on tuples of different dimension");
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (u[i] == u[j] && v[i] != v[j]) return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& p : k.props()) {
      if (k.has_prop(p, u[i]) && !k2.has_prop(p, v[i])) return false;
    }
  }
  // programs only in k2 never constrain; programs only in k have no edges to preserve
  for (const auto& prog : k.programs()) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (k.has_edge(prog, u[i], u[j]) && !k2.has_edge(prog, v[i], v[j])) return false;
      }
    }
  }
  return true;
}

}  // namespace pdl

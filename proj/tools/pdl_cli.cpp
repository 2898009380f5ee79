// pdl: command-line front end.
//
// Exit codes: 0 success/true, 1 semantic false, 2 usage/parse/model error,
// 3 unsupported fragment or failed precondition, 4 budget exceeded,
// 5 game/oracle disagreement.
//
// Budget defaults may be overridden through PDL_MAX_POSITIONS,
// PDL_MAX_NODES and PDL_MAX_BITS; explicit flags win over the environment.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdl/decomp.hpp"
#include "pdl/error.hpp"
#include "pdl/eval.hpp"
#include "pdl/expr.hpp"
#include "pdl/games.hpp"
#include "pdl/kripke.hpp"
#include "pdl/syntax.hpp"
#include "pdl/translate.hpp"

namespace {

enum Exit { kOk = 0, kFalse = 1, kUsage = 2, kFragment = 3, kBudget = 4, kDisagree = 5 };

std::size_t env_budget(const char* var, std::size_t fallback) {
  const char* s = std::getenv(var);
  if (!s || !*s) return fallback;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    std::cerr << "ignoring malformed " << var << "=" << s << "\n";
    return fallback;
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pdl::ModelError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

pdl::Sort sort_of(const std::string& kind) { return kind == "program" ? pdl::Sort::program : pdl::Sort::formula; }

pdl::WorldTuple world_list(const pdl::Kripke& k, const std::string& csv) {
  pdl::WorldTuple out;
  std::stringstream ss(csv);
  for (std::string name; std::getline(ss, name, ',');) out.push_back(k.world(name));
  if (out.empty() || out.size() > 2) throw pdl::Error("expected one or two comma-separated worlds, got '" + csv + "'");
  return out;
}

struct Args {
  // shared
  std::string expr, file, dialect = "any", kind = "formula";
  bool json = false;
  // translate
  std::string target;
  // check / game / unravel
  std::string model, model2, world, left, right, out, decomp;
  std::string game_kind;
  std::size_t k = 2, depth = 1;
  bool oracle = false;
  std::size_t max_positions = env_budget("PDL_MAX_POSITIONS", pdl::kDefaultPositionBudget);
  std::size_t max_nodes = env_budget("PDL_MAX_NODES", pdl::kDefaultUnravelNodes);
  // satsearch
  std::size_t min_worlds = 1, max_worlds = 3;
  std::size_t max_bits = env_budget("PDL_MAX_BITS", pdl::kDefaultSatSearchBits);
  std::vector<std::string> programs, props;
  bool dot = false;
};

pdl::Dialect dialect_of(const std::string& s) {
  auto d = pdl::dialect_from_string(s);
  if (!d) throw CLI::ValidationError("--dialect", "unknown dialect '" + s + "'");
  return *d;
}

int cmd_parse(const Args& a) {
  const std::string text = a.file.empty() ? a.expr : slurp(a.file);
  const pdl::Expr e = pdl::parse(text, dialect_of(a.dialect), sort_of(a.kind));
  if (a.json) {
    std::cout << pdl::to_json(e).dump() << "\n";
  } else {
    std::cout << pdl::render(e) << "\n";
  }
  return kOk;
}

int cmd_classify(const Args& a) {
  const pdl::Expr e = pdl::parse(a.expr, pdl::Dialect::any, sort_of(a.kind));
  std::cout << pdl::to_json(pdl::classify_fragment(e)).dump(2) << "\n";
  return kOk;
}

int cmd_translate(const Args& a) {
  const pdl::Expr e = pdl::parse(a.expr, pdl::Dialect::any, sort_of(a.kind));
  pdl::Expr r;
  if (a.target == "gloop") {
    r = pdl::loop_to_conj(e);
  } else if (a.target == "loop") {
    r = pdl::conj_to_loop(e);
  } else if (a.target == "gcap") {
    if (pdl::contains_kind(e, pdl::Kind::Conjunctive)) {
      throw pdl::FragmentError("--to gcap expects an expression without conjunctive programs");
    }
    r = pdl::intersection_to_conj(e);
  } else if (a.target == "icpdl") {
    r = pdl::tw2_to_icpdl(e);
  } else {
    r = pdl::intersection_to_conj(e);
  }
  std::cout << pdl::render(r) << "\n";
  return kOk;
}

int cmd_check(const Args& a) {
  const pdl::Kripke k = pdl::load_kripke(a.model);
  const pdl::Expr f = pdl::parse_formula(a.expr);
  if (!a.world.empty()) {
    const bool ok = pdl::holds(k, k.world(a.world), f);
    std::cout << (ok ? "true" : "false") << "\n";
    return ok ? kOk : kFalse;
  }
  pdl::eval_formula(k, f).for_each([&](pdl::World w) { std::cout << k.name(w) << "\n"; });
  return kOk;
}

int cmd_game(const Args& a) {
  const pdl::Kripke k1 = pdl::load_kripke(a.model);
  const pdl::Kripke k2 = pdl::load_kripke(a.model2);
  const pdl::WorldTuple u = world_list(k1, a.left);
  const pdl::WorldTuple v = world_list(k2, a.right);
  if (u.size() != v.size()) throw pdl::Error("--left and --right must have the same number of worlds");
  bool verdict = false;
  if (a.game_kind == "sim") {
    verdict = pdl::k_simulates(k1, u, k2, v, a.k, a.max_positions);
  } else if (a.game_kind == "halfbisim") {
    verdict = pdl::k_half_bisim(k1, u, k2, v, a.k, a.max_positions);
  } else {
    verdict = pdl::k_bisim(k1, u, k2, v, a.k, a.max_positions);
  }
  std::cout << (verdict ? "true" : "false") << "\n";

  if (a.oracle) {
    // S_k modal simulation decides the simulation game; the bisimulation
    // variants must imply it.
    const pdl::Kripke m1 = pdl::product_Sk(k1, a.k, a.max_positions);
    const pdl::Kripke m2 = pdl::product_Sk(k2, a.k, a.max_positions);
    const auto comp = pdl::connected_component(k1, u.front());
    bool connected = true;
    for (pdl::World w : u) connected = connected && comp.count(w);
    const bool ml = connected && pdl::ml_simulates(m1, pdl::tuple_index(pdl::pad(u, a.k), k1.size()), m2,
                                                   pdl::tuple_index(pdl::pad(v, a.k), k2.size()));
    const bool agrees = a.game_kind == "sim" ? ml == verdict : (!verdict || ml);
    if (!agrees) {
      std::cerr << "oracle disagreement: game says " << verdict << ", S_k modal simulation says " << ml << "\n";
      return kDisagree;
    }
    std::cerr << "oracle agrees\n";
  }
  return verdict ? kOk : kFalse;
}

int cmd_unravel(const Args& a) {
  const pdl::Kripke k = pdl::load_kripke(a.model);
  const pdl::Unravelling un = pdl::unravel(k, k.world(a.world), a.k, a.depth, a.max_nodes);
  pdl::store_kripke(un.model, a.out);
  if (!a.decomp.empty()) {
    std::ofstream dot(a.decomp);
    if (!dot) throw pdl::ModelError("cannot write " + a.decomp);
    dot << pdl::to_dot(un.decomposition);
  }
  nlohmann::json summary{{"root", un.model.name(un.root)},
                         {"worlds", un.model.size()},
                         {"bags", un.decomposition.bags.size()},
                         {"width", un.decomposition.width()}};
  std::cout << summary.dump() << "\n";
  return kOk;
}

int cmd_satsearch(const Args& a) {
  const pdl::Expr f = pdl::parse_formula(a.expr);
  pdl::SatSearchOptions opt;
  opt.min_worlds = a.min_worlds;
  opt.max_worlds = a.max_worlds;
  opt.max_bits = a.max_bits;
  opt.programs = {a.programs.begin(), a.programs.end()};
  opt.props = {a.props.begin(), a.props.end()};
  const auto found = pdl::sat_search(f, opt);
  if (!found) {
    std::cout << "none-found-at-bound\n";
    return kFalse;
  }
  nlohmann::json out{{"model", pdl::to_json(found->model)}, {"world", found->model.name(found->world)}};
  std::cout << out.dump() << "\n";
  return kOk;
}

int cmd_twdecomp(const Args& a) {
  const pdl::Expr p = pdl::parse_program(a.expr);
  if (p->kind() != pdl::Kind::Conjunctive) throw pdl::FragmentError("twdecomp expects a conjunctive program");
  const pdl::TreewidthResult tw = pdl::exact_treewidth(pdl::underlying_graph(p));
  if (a.dot) {
    std::cout << pdl::to_dot(tw.decomposition);
    return kOk;
  }
  nlohmann::json out{{"width", tw.width}, {"exact", tw.exact}, {"bags", tw.decomposition.bags},
                     {"tree", tw.decomposition.tree}};
  std::cout << out.dump() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  // CLI11 short options are one character; accept the documented "-K2".
  std::vector<std::string> tokens(argv, argv + argc);
  for (auto& t : tokens) {
    if (t == "-K2") t = "--K2";
  }
  std::vector<char*> argv2;
  for (auto& t : tokens) argv2.push_back(t.data());

  CLI::App app{"Model checking, translation and pebble games for PDL with conjunctive programs"};
  app.require_subcommand(1);
  Args a;

  auto add_expr = [&](CLI::App* sc, bool required = true) {
    auto* opt = sc->add_option("-e,--expr", a.expr, "expression text");
    if (required) opt->required();
  };
  auto add_kind = [&](CLI::App* sc) {
    sc->add_option("--kind", a.kind, "formula or program")->check(CLI::IsMember({"formula", "program"}));
  };

  auto* parse = app.add_subcommand("parse", "parse and echo an expression");
  add_expr(parse, false);
  parse->add_option("-f,--file", a.file, "read the expression from a file");
  parse->add_option("--dialect", a.dialect, "cpdl, loop-cpdl, icpdl, cpdl+, icpdl+ or any");
  add_kind(parse);
  parse->add_flag("--json", a.json, "print the syntax tree as JSON");

  auto* classify = app.add_subcommand("classify", "report dialects, widths and positivity");
  add_expr(classify);
  add_kind(classify);

  auto* translate = app.add_subcommand("translate", "rewrite into another fragment");
  add_expr(translate);
  add_kind(translate);
  translate->add_option("--to", a.target, "gloop, loop, gcap, icpdl or noint")
      ->required()
      ->check(CLI::IsMember({"gloop", "loop", "gcap", "icpdl", "noint"}));

  auto* check = app.add_subcommand("check", "evaluate a formula on a structure");
  check->add_option("-K,--model", a.model, "structure JSON")->required();
  add_expr(check);
  check->add_option("--world", a.world, "only test this world (exit 0 true, 1 false)");

  auto* game = app.add_subcommand("game", "decide a pebble game");
  game->add_option("kind", a.game_kind, "sim, halfbisim or bisim")
      ->required()
      ->check(CLI::IsMember({"sim", "halfbisim", "bisim"}));
  game->add_option("-K,--model", a.model, "left structure JSON")->required();
  game->add_option("--K2", a.model2, "right structure JSON")->required();
  game->add_option("-k", a.k, "number of pebbles (>= 2)")->required();
  game->add_option("--left", a.left, "w or w,w2 in the left structure")->required();
  game->add_option("--right", a.right, "w or w,w2 in the right structure")->required();
  game->add_flag("--oracle", a.oracle, "cross-check against modal simulation on S_k products");
  game->add_option("--max-positions", a.max_positions, "arena budget");

  auto* unravel = app.add_subcommand("unravel", "bounded tree-width k-1 unravelling");
  unravel->add_option("-K,--model", a.model, "structure JSON")->required();
  unravel->add_option("-u", a.world, "root world")->required();
  unravel->add_option("-k", a.k, "bag size bound")->required();
  unravel->add_option("--depth", a.depth, "tree depth");
  unravel->add_option("-o,--out", a.out, "output structure JSON")->required();
  unravel->add_option("--decomp", a.decomp, "write the decomposition as DOT");
  unravel->add_option("--max-nodes", a.max_nodes, "tree node budget");

  auto* sat = app.add_subcommand("satsearch", "bounded search for a pointed model");
  add_expr(sat);
  sat->add_option("--min-worlds", a.min_worlds, "smallest world count tried");
  sat->add_option("--max-worlds", a.max_worlds, "largest world count tried");
  sat->add_option("--max-bits", a.max_bits, "largest free bit count per world count");
  sat->add_option("--programs", a.programs, "program signature")->delimiter(',');
  sat->add_option("--props", a.props, "prop signature")->delimiter(',');

  auto* twd = app.add_subcommand("twdecomp", "tree decomposition of a conjunctive program");
  add_expr(twd);
  twd->add_flag("--dot", a.dot, "print DOT instead of JSON");

  try {
    app.parse(static_cast<int>(argv2.size()), argv2.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*parse) {
      if (a.expr.empty() == a.file.empty()) throw CLI::ValidationError("parse", "give exactly one of -e and -f");
      return cmd_parse(a);
    }
    if (*classify) return cmd_classify(a);
    if (*translate) return cmd_translate(a);
    if (*check) return cmd_check(a);
    if (*game) return cmd_game(a);
    if (*unravel) return cmd_unravel(a);
    if (*sat) return cmd_satsearch(a);
    if (*twd) return cmd_twdecomp(a);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const pdl::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const pdl::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kUsage;
  } catch (const pdl::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const pdl::Error& e) {
    // fragment violations, dialect mismatches and failed preconditions
    std::cerr << "unsupported: " << e.what() << "\n";
    return kFragment;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "json error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

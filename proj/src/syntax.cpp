#include "pdl/syntax.hpp"

#include <cctype>
#include <optional>

#include "pdl/error.hpp"

namespace pdl {

namespace {

enum class Tok { Ident, Sym, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  std::size_t pos = 0;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
    } else if (std::string_view("<>(){}[],!&|+;*~?").find(c) != std::string_view::npos) {
      out.push_back({Tok::Sym, std::string(1, c), i});
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

bool is_keyword(const std::string& s) {
  return s == "eps" || s == "loop" || s == "true" || s == "false";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Expr whole(Sort sort) {
    Expr e = sort == Sort::formula ? formula() : program();
    if (peek().type != Tok::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(at_ + ahead, toks_.size() - 1)];
  }
  bool sym(const char* s, std::size_t ahead = 0) const {
    return peek(ahead).type == Tok::Sym && peek(ahead).text == s;
  }
  bool word(const char* s) const { return peek().type == Tok::Ident && peek().text == s; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg.empty() ? "unexpected end of input" : msg, peek().pos);
  }

  void expect(const char* s) {
    if (!sym(s)) {
      fail(peek().type == Tok::End ? std::string("expected '") + s + "' before end of input"
                                   : std::string("expected '") + s + "', found '" + peek().text + "'");
    }
    ++at_;
  }

  std::string ident(const char* what) {
    if (peek().type != Tok::Ident || is_keyword(peek().text)) fail(std::string("expected ") + what);
    return toks_[at_++].text;
  }

  // A conversion failure inside a factory carries no position; attach one.
  template <typename F>
  Expr build(std::size_t pos, F&& f) {
    try {
      return f();
    } catch (const ParseError&) {
      throw;
    } catch (const ExprError& e) {
      throw ParseError(e.what(), pos);
    }
  }

  bool starts_unary() const {
    const Token& t = peek();
    if (t.type == Tok::Ident) return true;
    return sym("!") || sym("<") || sym("(");
  }

  Expr formula() {
    Expr f = conj();
    while (sym("|")) {
      ++at_;
      f = disjoin(f, conj());
    }
    return f;
  }

  Expr conj() {
    Expr f = unary();
    while (sym("&")) {
      ++at_;
      f = conjoin(f, unary());
    }
    return f;
  }

  Expr unary() {
    const Token t = peek();
    if (sym("!")) {
      ++at_;
      return negate(unary());
    }
    if (sym("<")) {
      ++at_;
      Expr p = program();
      expect(">");
      if (starts_unary()) return diamond(compose(p, test(unary())));
      return diamond(p);
    }
    if (t.type == Tok::Ident) {
      if (t.text == "loop") {
        ++at_;
        expect("(");
        Expr p = program();
        expect(")");
        return loop(p);
      }
      if (t.text == "true") {
        ++at_;
        return verum();
      }
      if (t.text == "false") {
        ++at_;
        return falsum();
      }
      if (t.text == "eps") fail("'eps' is a program, not a formula");
      ++at_;
      return prop(t.text);
    }
    if (sym("(")) {
      ++at_;
      Expr f = formula();
      expect(")");
      return f;
    }
    fail(t.type == Tok::End ? "" : "unexpected '" + t.text + "' in formula");
  }

  Expr program() {
    Expr p = isect();
    while (sym("+")) {
      ++at_;
      p = choice(p, isect());
    }
    return p;
  }

  Expr isect() {
    Expr p = seq();
    while (sym("&")) {
      ++at_;
      p = intersect(p, seq());
    }
    return p;
  }

  Expr seq() {
    Expr p = post();
    while (sym(";")) {
      ++at_;
      p = compose(p, post());
    }
    return p;
  }

  Expr post() {
    Expr p = prim();
    while (sym("*")) {
      ++at_;
      p = star(p);
    }
    return p;
  }

  Expr prim() {
    const Token t = peek();
    if (t.type == Tok::Ident) {
      if (t.text == "eps") {
        ++at_;
        return epsilon();
      }
      if (t.text == "true" || t.text == "false") {
        ++at_;
        expect("?");
        return test(t.text == "true" ? verum() : falsum());
      }
      if (t.text == "loop") fail("a loop test must be written '(loop(...))?'");
      ++at_;
      if (sym("?")) {
        ++at_;
        return test(prop(t.text));
      }
      return atomic(t.text);
    }
    if (sym("~")) {
      ++at_;
      if (peek().type != Tok::Ident || is_keyword(peek().text)) {
        fail("converse applies only to atomic program names");
      }
      return converse(toks_[at_++].text);
    }
    if (sym("(")) return parenthesized();
    if (sym("{")) return conjunctive_program();
    fail(t.type == Tok::End ? "" : "unexpected '" + t.text + "' in program");
  }

  // `(` opens either a test `(formula)?` or a grouped program.
  Expr parenthesized() {
    const std::size_t mark = at_;
    std::optional<ParseError> formula_error;
    try {
      ++at_;
      Expr f = formula();
      expect(")");
      expect("?");
      return test(f);
    } catch (const ParseError& e) {
      formula_error = e;
    }
    at_ = mark;
    try {
      ++at_;
      Expr p = program();
      expect(")");
      return p;
    } catch (const ParseError& e) {
      // report whichever reading got further
      if (formula_error && formula_error->position() > e.position()) throw *formula_error;
      throw;
    }
  }

  Expr conjunctive_program() {
    const std::size_t start = peek().pos;
    expect("{");
    std::vector<Atom> atoms;
    while (true) {
      Expr p = post();
      expect("(");
      std::string l = ident("variable");
      expect(",");
      std::string r = ident("variable");
      expect(")");
      atoms.push_back({p, l, r});
      if (sym(",")) {
        ++at_;
        continue;
      }
      break;
    }
    expect("}");
    expect("[");
    std::string s = ident("source variable");
    expect(",");
    std::string t = ident("target variable");
    expect("]");
    return build(start, [&] { return conjunctive(std::move(atoms), s, t); });
  }
};

// Program binding levels, loosest first.
enum Level { kUnion = 0, kIntersect = 1, kCompose = 2, kStar = 3, kPrim = 4 };

int level(const Expr& p) {
  switch (p->kind()) {
    case Kind::Union: return kUnion;
    case Kind::Intersect: return kIntersect;
    case Kind::Compose: return kCompose;
    case Kind::Star: return kStar;
    default: return kPrim;
  }
}

void render_formula(const Expr& f, int min_level, std::string& out);

void render_program(const Expr& p, int min_level, std::string& out) {
  const bool wrap = level(p) < min_level;
  if (wrap) out += '(';
  switch (p->kind()) {
    case Kind::Epsilon: out += "eps"; break;
    case Kind::Atomic: out += p->name(); break;
    case Kind::Converse: out += "~" + p->name(); break;
    case Kind::Union:
      render_program(p->first(), kUnion, out);
      out += " + ";
      render_program(p->second(), kUnion + 1, out);
      break;
    case Kind::Intersect:
      render_program(p->first(), kIntersect, out);
      out += " & ";
      render_program(p->second(), kIntersect + 1, out);
      break;
    case Kind::Compose:
      render_program(p->first(), kCompose, out);
      out += " ; ";
      render_program(p->second(), kCompose + 1, out);
      break;
    case Kind::Star:
      render_program(p->first(), kStar, out);
      out += '*';
      break;
    case Kind::Test:
      if (p->first()->kind() == Kind::Prop) {
        out += p->first()->name() + "?";
      } else {
        out += '(';
        render_formula(p->first(), 0, out);
        out += ")?";
      }
      break;
    case Kind::Conjunctive: {
      out += '{';
      bool first = true;
      for (const Atom& a : p->atoms()) {
        if (!first) out += ", ";
        first = false;
        render_program(a.program, kStar, out);
        out += "(" + a.left + "," + a.right + ")";
      }
      out += "}[" + p->source() + "," + p->target() + "]";
      break;
    }
    default: throw ExprError("render: formula in program position");
  }
  if (wrap) out += ')';
}

// Formula levels: 0 conjunction, 1 unary.
void render_formula(const Expr& f, int min_level, std::string& out) {
  switch (f->kind()) {
    case Kind::Prop: out += f->name(); break;
    case Kind::Not:
      out += '!';
      render_formula(f->first(), 1, out);
      break;
    case Kind::And:
      if (min_level > 0) out += '(';
      render_formula(f->first(), 0, out);
      out += " & ";
      render_formula(f->second(), 1, out);
      if (min_level > 0) out += ')';
      break;
    case Kind::Diamond:
      out += '<';
      render_program(f->first(), kUnion, out);
      out += '>';
      break;
    case Kind::Loop:
      out += "loop(";
      render_program(f->first(), kUnion, out);
      out += ')';
      break;
    default: throw ExprError("render: program in formula position");
  }
}

}  // namespace

Expr parse(std::string_view text, Dialect dialect, Sort sort) {
  Parser parser(text);
  Expr e;
  try {
    e = parser.whole(sort);
  } catch (const ParseError&) {
    throw;
  } catch (const ExprError& err) {
    // sort mismatches raised by factories
    throw ParseError(err.what(), 0);
  }
  check_dialect(e, dialect);
  return e;
}

Expr parse_formula(std::string_view text, Dialect dialect) { return parse(text, dialect, Sort::formula); }
Expr parse_program(std::string_view text, Dialect dialect) { return parse(text, dialect, Sort::program); }

std::string render(const Expr& e) {
  std::string out;
  if (e->is_formula()) {
    render_formula(e, 0, out);
  } else {
    render_program(e, kUnion, out);
  }
  return out;
}

nlohmann::json to_json(const Expr& e) {
  nlohmann::json j;
  j["kind"] = kind_name(e->kind());
  switch (e->kind()) {
    case Kind::Prop:
    case Kind::Atomic:
    case Kind::Converse:
      j["name"] = e->name();
      break;
    case Kind::Not:
      j["formula"] = to_json(e->first());
      break;
    case Kind::Diamond:
    case Kind::Loop:
    case Kind::Star:
      j["program"] = to_json(e->first());
      break;
    case Kind::Test:
      j["formula"] = to_json(e->first());
      break;
    case Kind::And:
    case Kind::Union:
    case Kind::Compose:
    case Kind::Intersect:
      j["left"] = to_json(e->first());
      j["right"] = to_json(e->second());
      break;
    case Kind::Epsilon:
      break;
    case Kind::Conjunctive: {
      nlohmann::json atoms = nlohmann::json::array();
      for (const Atom& a : e->atoms()) {
        atoms.push_back({{"program", to_json(a.program)}, {"left", a.left}, {"right", a.right}});
      }
      j["atoms"] = std::move(atoms);
      j["source"] = e->source();
      j["target"] = e->target();
      break;
    }
  }
  return j;
}

Expr from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "Prop") return prop(j.at("name").get<std::string>());
    if (kind == "Not") return negate(from_json(j.at("formula")));
    if (kind == "And") return conjoin(from_json(j.at("left")), from_json(j.at("right")));
    if (kind == "Diamond") return diamond(from_json(j.at("program")));
    if (kind == "Loop") return loop(from_json(j.at("program")));
    if (kind == "Epsilon") return epsilon();
    if (kind == "Atomic") return atomic(j.at("name").get<std::string>());
    if (kind == "Converse") return converse(j.at("name").get<std::string>());
    if (kind == "Union") return choice(from_json(j.at("left")), from_json(j.at("right")));
    if (kind == "Compose") return compose(from_json(j.at("left")), from_json(j.at("right")));
    if (kind == "Star") return star(from_json(j.at("program")));
    if (kind == "Test") return test(from_json(j.at("formula")));
    if (kind == "Intersect") return intersect(from_json(j.at("left")), from_json(j.at("right")));
    if (kind == "Conjunctive") {
      std::vector<Atom> atoms;
      for (const auto& a : j.at("atoms")) {
        atoms.push_back({from_json(a.at("program")), a.at("left").get<std::string>(),
                         a.at("right").get<std::string>()});
      }
      return conjunctive(std::move(atoms), j.at("source").get<std::string>(),
                         j.at("target").get<std::string>());
    }
    throw ExprError("unknown expression kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ExprError(std::string("malformed expression JSON: ") + e.what());
  }
}

}  // namespace pdl

#pragma once

// Concrete syntax. Tightest binding first:
//
//   programs   postfix `*`, `;` composition, `&` intersection, `+` union
//   formulas   prefix `!`, `&` conjunction, `|` disjunction (sugar)
//
//   formula  ::= disj
//   disj     ::= conj ('|' conj)*
//   conj     ::= unary ('&' unary)*
//   unary    ::= '!' unary
//              |  '<' program '>' [unary]        -- `<p> f` is `<p ; (f)?>`
//              |  'loop' '(' program ')'
//              |  'true' | 'false' | IDENT | '(' formula ')'
//   program  ::= isect ('+' isect)*
//   isect    ::= seq ('&' seq)*
//   seq      ::= post (';' post)*
//   post     ::= prim '*'*
//   prim     ::= 'eps' | IDENT | '~' IDENT | IDENT '?' | 'true' '?' | 'false' '?'
//              |  '(' formula ')' '?' | '(' program ')'
//              |  '{' atom (',' atom)* '}' '[' IDENT ',' IDENT ']'
//   atom     ::= post '(' IDENT ',' IDENT ')'
//
// IDENT is [a-zA-Z_][a-zA-Z0-9_]* minus the keywords eps, loop, true, false.
// `#` starts a comment that runs to the end of the line.

#include <string>
#include <string_view>

#include "pdl/expr.hpp"
#include "json.hpp"

namespace pdl {

enum class Sort { formula, program };

Expr parse(std::string_view text, Dialect dialect, Sort sort);
Expr parse_formula(std::string_view text, Dialect dialect = Dialect::any);
Expr parse_program(std::string_view text, Dialect dialect = Dialect::any);

/// Minimal-parenthesis rendering; parse(render(e)) == e.
std::string render(const Expr& e);

/// JSON AST: {"kind": "<constructor>", ...} with the constructor names of `Kind`.
nlohmann::json to_json(const Expr& e);
Expr from_json(const nlohmann::json& j);

}  // namespace pdl

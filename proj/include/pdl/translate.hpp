#pragma once

// Equivalence-preserving translations between the fragments:
//
//   loop_to_conj          loop(π)        ->  <{π(x,x)}[x,x]>
//   conj_to_loop          {π(x,x),...}[x,x] ->  (loop(π) & ...)?
//   intersection_to_conj  π1 & π2        ->  {π1(x,y), π2(x,y)}[x,y]
//   tw2_to_icpdl          conjunctive programs of tree-width <= 2 -> ICPDL
//
// All translations are homomorphic on the remaining constructors and
// deterministic.

#include <string>
#include <vector>

#include "pdl/expr.hpp"

namespace pdl {

/// Replaces every loop(π) by <{π(x,x)}[x,x]>, innermost first.
Expr loop_to_conj(const Expr& e);

/// Replaces every {π1(x,x), ..., πn(x,x)}[x,x] by (loop(π1) & ... & loop(πn))?.
/// Throws FragmentError if some conjunctive program has another shape.
Expr conj_to_loop(const Expr& e);

/// Replaces every π1 & π2 by {π1(x,y), π2(x,y)}[x,y].
Expr intersection_to_conj(const Expr& e);

/// π⁻¹ with ⟦π⁻¹⟧ = converse of ⟦π⟧: a <-> ~a, eps and tests fixed,
/// (π1 ⋆ π2)⁻¹ = π2⁻¹ ⋆ π1⁻¹, (π*)⁻¹ = (π⁻¹)*, C[x,y]⁻¹ = C[y,x].
Expr reverse_program(const Expr& p);

/// The ICPDL program equivalent to C[x,y] for an atom set over at most three
/// variables whose variable graph is a clique and whose atom programs
/// contain no conjunctive programs. x == y yields the test form. Throws
/// FragmentError when the preconditions fail.
Expr lemita_block(const std::vector<Atom>& atoms, const std::string& x, const std::string& y);

/// Removes every conjunctive program, each of which must have an underlying
/// graph of tree-width at most 2. Throws FragmentError naming the offending
/// subexpression otherwise, and on loop(...) which is outside ICPDL+.
Expr tw2_to_icpdl(const Expr& e);

}  // namespace pdl

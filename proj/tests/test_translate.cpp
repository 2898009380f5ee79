#include <gtest/gtest.h>

#include <cmath>

#include "pdl/decomp.hpp"
#include "pdl/error.hpp"
#include "pdl/eval.hpp"
#include "pdl/syntax.hpp"
#include "pdl/translate.hpp"
#include "support.hpp"

using namespace pdl;

namespace {

Expr F(const std::string& s) { return parse_formula(s); }
Expr P(const std::string& s) { return parse_program(s); }

// Corpus of small structures shared by the semantic checks below.
std::vector<Kripke> corpus(std::uint64_t seed, int n = 40) {
  pdltest::Rng rng(seed);
  std::vector<Kripke> out;
  for (int i = 0; i < n; ++i) out.push_back(pdltest::random_kripke(rng, 5, 0.15 + 0.05 * (i % 6)));
  return out;
}

void expect_same_formula(const Expr& a, const Expr& b, const std::vector<Kripke>& ks) {
  for (const auto& k : ks) ASSERT_EQ(eval_formula(k, a), eval_formula(k, b)) << render(a) << "  vs  " << render(b);
}

void expect_same_program(const Expr& a, const Expr& b, const std::vector<Kripke>& ks) {
  for (const auto& k : ks) ASSERT_EQ(eval_program(k, a), eval_program(k, b)) << render(a) << "  vs  " << render(b);
}

}  // namespace

TEST(LoopToConj, Examples) {
  EXPECT_EQ(render(loop_to_conj(F("loop(a)"))), "<{a(x,x)}[x,x]>");
  EXPECT_EQ(render(loop_to_conj(F("loop(a;b)"))), "<{(a ; b)(x,x)}[x,x]>");
  const Expr nested = loop_to_conj(F("loop((loop(a))? ; b)"));
  EXPECT_FALSE(contains_kind(nested, Kind::Loop));
  expect_same_formula(nested, F("loop((loop(a))? ; b)"), corpus(1));
}

TEST(ConjToLoop, Examples) {
  EXPECT_EQ(render(conj_to_loop(P("{a(x,x)}[x,x]"))), "(loop(a))?");
  EXPECT_EQ(render(conj_to_loop(P("{a(x,x), b(x,x)}[x,x]"))), "(loop(a) & loop(b))?");
  EXPECT_THROW(conj_to_loop(P("{a(x,y)}[x,y]")), FragmentError);
}

TEST(IntersectionToConj, Examples) {
  EXPECT_EQ(render(intersection_to_conj(P("a & b"))), "{a(x,y), b(x,y)}[x,y]");
  EXPECT_EQ(render(intersection_to_conj(P("(a & b)*"))), "{a(x,y), b(x,y)}[x,y]*");
  const Expr nested = intersection_to_conj(P("a & (b & ~a)"));
  EXPECT_FALSE(contains_kind(nested, Kind::Intersect));
  expect_same_program(nested, P("a & (b & ~a)"), corpus(2));
}

TEST(Reverse, Examples) {
  EXPECT_EQ(render(reverse_program(P("a ; b"))), "~b ; ~a");
  EXPECT_EQ(render(reverse_program(P("~a"))), "a");
  EXPECT_EQ(render(reverse_program(P("p?"))), "p?");
  EXPECT_EQ(render(reverse_program(P("{a(x,y), b(y,z)}[x,z]"))), "{a(x,y), b(y,z)}[z,x]");
}

TEST(Reverse, DenotesTheConverseAndIsAnInvolution) {
  pdltest::Rng rng(71);
  pdltest::Profile pr;
  pr.intersect = pr.conj = pr.loop = true;
  const auto ks = corpus(3, 20);
  for (int i = 0; i < 300; ++i) {
    const Expr p = pdltest::random_program(rng, 4, pr);
    const Expr r = reverse_program(p);
    ASSERT_TRUE(equal(reverse_program(r), p)) << render(p);
    for (const auto& k : ks) ASSERT_EQ(eval_program(k, r), eval_program(k, p).converse()) << render(p);
  }
}

TEST(Lemita, SingleAtomBetweenTwoVariables) {
  const Expr p = lemita_block({{atomic("a"), "x", "y"}}, "x", "y");
  EXPECT_FALSE(contains_kind(p, Kind::Conjunctive));
  expect_same_program(p, P("a"), corpus(4));
}

TEST(Lemita, SelfLoopOnOneVariable) {
  const Expr p = lemita_block({{atomic("a"), "x", "x"}}, "x", "x");
  EXPECT_EQ(render(p), "(<a & eps>)?");
  expect_same_program(p, P("(loop(a))?"), corpus(5));
}

TEST(Lemita, ThreeVariableTriangle) {
  const std::vector<Atom> atoms{{atomic("a"), "x1", "x2"}, {atomic("b"), "x2", "x3"}, {converse("a"), "x3", "x1"},
                                {atomic("b"), "x3", "x3"}};
  const Expr expected = conjunctive(atoms, "x1", "x2");
  expect_same_program(lemita_block(atoms, "x1", "x2"), expected, corpus(6));
  expect_same_program(lemita_block(atoms, "x2", "x2"), conjunctive(atoms, "x2", "x2"), corpus(6));
}

TEST(Lemita, Preconditions) {
  EXPECT_THROW(lemita_block({{atomic("a"), "x", "y"}, {atomic("a"), "y", "z"}, {atomic("a"), "z", "u"}}, "x", "u"),
               FragmentError);
  EXPECT_THROW(lemita_block({{atomic("a"), "x", "y"}, {atomic("a"), "y", "z"}}, "x", "z"), FragmentError);
  EXPECT_THROW(lemita_block({{atomic("a"), "x", "y"}}, "x", "q"), FragmentError);
}

TEST(Tw2ToIcpdl, Examples) {
  const auto ks = corpus(7);
  const Expr cap = tw2_to_icpdl(P("{a(x,y), b(x,y)}[x,y]"));
  EXPECT_FALSE(contains_kind(cap, Kind::Conjunctive));
  expect_same_program(cap, P("a & b"), ks);
  const Expr lp = tw2_to_icpdl(P("{a(x,x)}[x,x]"));
  expect_same_program(lp, P("(loop(a))?"), ks);
  EXPECT_THROW(tw2_to_icpdl(F("loop(a)")), FragmentError);
  EXPECT_THROW(tw2_to_icpdl(P("{a(x1,x2), a(x1,x3), a(x1,x4), a(x2,x3), a(x2,x4), a(x3,x4)}[x1,x2]")), FragmentError);
}

TEST(Tw2ToIcpdl, SixVariableProgramNeedsSeveralLeafEliminations) {
  // two triangles glued along x1-x2, a pendant triangle on x3-x5 and a
  // dangling self-loop variable x6
  const Expr c = P("{a(x1,x2), b(x2,x3), a(x3,x1), b(x1,x4), a(x4,x2), a(x3,x5), ~b(x5,x3), b(x5,x6), a(x6,x6)}[x1,x2]");
  ASSERT_EQ(exact_treewidth(underlying_graph(c)).width, 2u);
  ASSERT_GE(cliqueify(c, 2).decomposition.bags.size(), 4u);
  const Expr t = tw2_to_icpdl(c);
  EXPECT_FALSE(contains_kind(t, Kind::Conjunctive));
  expect_same_program(t, c, corpus(8, 60));
}

TEST(Preservation, RandomExpressionsInEachDomain) {
  pdltest::Rng rng(73);
  const auto ks = corpus(9, 12);
  pdltest::Profile loops, selfloops, ints, tw2;
  loops.loop = true;
  selfloops.conj = selfloops.self_loop_conj_only = true;
  ints.intersect = true;
  tw2.conj = tw2.intersect = true;
  for (int i = 0; i < 150; ++i) {
    const Expr a = pdltest::random_formula(rng, 4, loops);
    expect_same_formula(loop_to_conj(a), a, ks);
    const Expr b = pdltest::random_formula(rng, 4, selfloops);
    expect_same_formula(conj_to_loop(b), b, ks);
    const Expr c = pdltest::random_formula(rng, 4, ints);
    expect_same_formula(intersection_to_conj(c), c, ks);
    const Expr d = pdltest::random_formula(rng, 4, tw2);
    expect_same_formula(tw2_to_icpdl(d), d, ks);
  }
}

TEST(Preservation, LoopRoundTrips) {
  pdltest::Rng rng(79);
  const auto ks = corpus(10, 12);
  pdltest::Profile loops, selfloops;
  loops.loop = true;
  selfloops.conj = selfloops.self_loop_conj_only = true;
  for (int i = 0; i < 150; ++i) {
    const Expr a = pdltest::random_formula(rng, 4, loops);
    expect_same_formula(conj_to_loop(loop_to_conj(a)), a, ks);
    const Expr b = pdltest::random_formula(rng, 4, selfloops);
    expect_same_formula(loop_to_conj(conj_to_loop(b)), b, ks);
  }
}

TEST(Targets, OutputsLandInTheirFragments) {
  pdltest::Rng rng(83);
  pdltest::Profile loops, ints, tw2;
  loops.loop = true;
  ints.intersect = true;
  tw2.conj = tw2.intersect = true;
  for (int i = 0; i < 200; ++i) {
    ASSERT_TRUE(classify_fragment(loop_to_conj(pdltest::random_formula(rng, 4, loops))).in_gloop);
    ASSERT_TRUE(classify_fragment(intersection_to_conj(pdltest::random_formula(rng, 4, ints))).in_gcap);
    const Expr t = tw2_to_icpdl(pdltest::random_formula(rng, 4, tw2));
    ASSERT_FALSE(contains_kind(t, Kind::Conjunctive));
    ASSERT_TRUE(in_dialect(t, Dialect::icpdl));
  }
}

TEST(Targets, Tw2OutputGrowsPolynomially) {
  // Regression bound measured over random conjunctive programs: the output
  // stays within 40 * n^2 nodes for input size n.
  pdltest::Rng rng(89);
  pdltest::Profile tw2;
  tw2.conj = true;
  for (int i = 0; i < 300; ++i) {
    const Expr p = pdltest::random_program(rng, 4, tw2);
    const double n = static_cast<double>(size(p));
    ASSERT_LE(static_cast<double>(size(tw2_to_icpdl(p))), 40.0 * n * n) << render(p);
  }
}

TEST(Determinism, SameInputSameOutput) {
  const Expr c = P("{a(x1,x2), b(x2,x3), a(x3,x1), b(x1,x4), a(x4,x2)}[x1,x2]");
  EXPECT_EQ(render(tw2_to_icpdl(c)), render(tw2_to_icpdl(c)));
}

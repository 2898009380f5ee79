#include <gtest/gtest.h>

#include <algorithm>

#include "pdl/error.hpp"
#include "pdl/expr.hpp"
#include "pdl/syntax.hpp"
#include "support.hpp"

using namespace pdl;

namespace {

Expr F(const std::string& s) { return parse_formula(s); }
Expr P(const std::string& s) { return parse_program(s); }

}  // namespace

TEST(Parse, DiamondOfAtomic) {
  const Expr e = parse("<a>", Dialect::cpdl, Sort::formula);
  ASSERT_EQ(e->kind(), Kind::Diamond);
  EXPECT_EQ(e->first()->kind(), Kind::Atomic);
  EXPECT_EQ(e->first()->name(), "a");
}

TEST(Parse, LoopOfComposition) {
  const Expr e = parse("loop(a;b)", Dialect::loop_cpdl, Sort::formula);
  ASSERT_EQ(e->kind(), Kind::Loop);
  EXPECT_TRUE(equal(e->first(), compose(atomic("a"), atomic("b"))));
}

TEST(Parse, ConjunctiveProgram) {
  const Expr e = parse("{a(x,y), b(x,y)}[x,y]", Dialect::cpdl_plus, Sort::program);
  ASSERT_EQ(e->kind(), Kind::Conjunctive);
  EXPECT_EQ(e->atoms().size(), 2u);
  EXPECT_EQ(e->source(), "x");
  EXPECT_EQ(e->target(), "y");
}

TEST(Parse, EndpointOutsideAtomsIsRejected) { EXPECT_THROW(P("{a(x,y)}[x,z]"), ParseError); }

TEST(Parse, DisconnectedAtomsAreRejected) { EXPECT_THROW(P("{a(x,y), b(z,u)}[x,y]"), ParseError); }

TEST(Parse, ErrorsCarryOffsets) {
  try {
    F("<a> & ");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 6u);
  }
  EXPECT_THROW(F("<a"), ParseError);
  EXPECT_THROW(F("p q"), ParseError);
  EXPECT_THROW(P("~(a)"), ParseError);
  EXPECT_THROW(P("loop"), ParseError);
}

TEST(Parse, KeywordsAreNotNames) {
  EXPECT_THROW(F("eps"), ParseError);
  EXPECT_THROW(prop("loop"), ExprError);
  EXPECT_THROW(atomic("true"), ExprError);
  EXPECT_THROW(atomic("2a"), ExprError);
}

TEST(Parse, Sugar) {
  EXPECT_TRUE(equal(F("true"), diamond(epsilon())));
  EXPECT_TRUE(equal(F("false"), negate(diamond(epsilon()))));
  EXPECT_TRUE(equal(F("p | q"), negate(conjoin(negate(prop("p")), negate(prop("q"))))));
  EXPECT_TRUE(equal(F("<a> p"), diamond(compose(atomic("a"), test(prop("p"))))));
  EXPECT_TRUE(equal(P("p?"), test(prop("p"))));
  EXPECT_TRUE(equal(P("(p & q)?"), test(conjoin(prop("p"), prop("q")))));
  EXPECT_TRUE(equal(P("a & b"), intersect(atomic("a"), atomic("b"))));
}

TEST(Parse, CommentsAndWhitespace) { EXPECT_TRUE(equal(F("  <a>  # trailing\n"), diamond(atomic("a")))); }

TEST(Parse, DialectGate) {
  EXPECT_THROW(parse("loop(a)", Dialect::cpdl, Sort::formula), ExprError);
  EXPECT_THROW(parse("<a & b>", Dialect::cpdl, Sort::formula), ExprError);
  EXPECT_THROW(parse("<{a(x,y)}[x,y]>", Dialect::icpdl, Sort::formula), ExprError);
  EXPECT_NO_THROW(parse("<a & b>", Dialect::icpdl, Sort::formula));
  EXPECT_NO_THROW(parse("<{a(x,y)}[x,y] & b>", Dialect::icpdl_plus, Sort::formula));
  EXPECT_EQ(dialect_from_string("loop-cpdl"), Dialect::loop_cpdl);
  EXPECT_EQ(dialect_from_string("icpdl+"), Dialect::icpdl_plus);
  EXPECT_FALSE(dialect_from_string("mu-calculus").has_value());
}

TEST(Render, Examples) {
  EXPECT_EQ(render(diamond(atomic("a"))), "<a>");
  EXPECT_EQ(render(compose(choice(atomic("a"), atomic("b")), star(atomic("c")))), "(a + b) ; c*");
  EXPECT_EQ(render(conjunctive({{atomic("a"), "x", "y"}, {atomic("b"), "x", "y"}}, "x", "y")), "{a(x,y), b(x,y)}[x,y]");
}

TEST(Render, RightNestedOperatorsKeepParentheses) {
  const Expr e = compose(atomic("a"), compose(atomic("b"), atomic("c")));
  EXPECT_TRUE(equal(P(render(e)), e));
  const Expr f = conjoin(prop("p"), conjoin(prop("q"), prop("p")));
  EXPECT_TRUE(equal(F(render(f)), f));
}

TEST(RoundTrip, RandomExpressionsParseBackIdentically) {
  pdltest::Rng rng(11);
  pdltest::Profile pr;
  pr.loop = pr.intersect = pr.conj = true;
  for (int i = 0; i < 1500; ++i) {
    const Expr e = pdltest::random_formula(rng, 6, pr);
    const std::string text = render(e);
    const Expr back = parse_formula(text);
    ASSERT_TRUE(equal(back, e)) << text << " reparsed as " << render(back);
    ASSERT_TRUE(equal(from_json(to_json(e)), e)) << text;
  }
}

TEST(Json, ShapeOfADiamond) {
  const auto j = to_json(diamond(atomic("a")));
  EXPECT_EQ(j.at("kind"), "Diamond");
  EXPECT_EQ(j.at("program").at("kind"), "Atomic");
  EXPECT_EQ(j.at("program").at("name"), "a");
  EXPECT_THROW(from_json(nlohmann::json{{"kind", "Nope"}}), Error);
}

TEST(Subexpressions, Examples) {
  const auto d = subexpressions(F("<a>"));
  EXPECT_EQ(d.size(), 2u);
  const Expr c = P("{a(x,y), (b;c)(y,y)}[x,y]");
  const auto s = subexpressions(c);
  std::set<std::string> rendered;
  for (const auto& e : s) rendered.insert(render(e));
  EXPECT_EQ(rendered, (std::set<std::string>{render(c), "a", "b ; c", "b", "c"}));
  EXPECT_EQ(subexpressions(F("!p")).size(), 2u);
}

TEST(Subexpressions, ClosedUnderTakingSubexpressions) {
  pdltest::Rng rng(3);
  pdltest::Profile pr;
  pr.loop = pr.intersect = pr.conj = true;
  for (int i = 0; i < 200; ++i) {
    const Expr e = pdltest::random_formula(rng, 5, pr);
    const auto all = subexpressions(e);
    std::set<Expr, ExprLess> outer(all.begin(), all.end());
    for (const auto& sub : all) {
      for (const auto& inner : subexpressions(sub)) ASSERT_TRUE(outer.count(inner)) << render(e);
    }
  }
}

TEST(Measures, Examples) {
  EXPECT_EQ(measures(P("{a(x,y), b(y,z)}[x,z]")).cq_width, 2u);
  EXPECT_EQ(intersection_width_of_program(P("a & (b & c)")), 3u);
  EXPECT_EQ(measures(F("<a>")).negation_depth, 1u);
  EXPECT_EQ(measures(F("!<(!p)?>")).negation_depth, 3u);
  EXPECT_FALSE(measures(F("<a ; (!p)?>")).is_positive);
  EXPECT_TRUE(measures(F("<a ; p?>")).is_positive);
  EXPECT_FALSE(measures(F("<{a(x,y)}[x,y]>")).intersection_width.has_value());
}

TEST(Measures, WidthsAreBoundedAndRenamingInvariant) {
  pdltest::Rng rng(5);
  pdltest::Profile icpdl;
  icpdl.intersect = true;
  for (int i = 0; i < 300; ++i) {
    const Expr e = pdltest::random_formula(rng, 5, icpdl);
    const Measures m = measures(e);
    ASSERT_GE(m.cq_width, 1u);
    ASSERT_TRUE(m.intersection_width.has_value());
    ASSERT_LE(*m.intersection_width, size(e));
  }
  const Expr c1 = P("{a(x,y), b(y,z)}[x,z]");
  const Expr c2 = P("{a(u,v), b(v,w)}[u,w]");
  EXPECT_FALSE(equal(c1, c2));
  EXPECT_EQ(measures(c1).cq_width, measures(c2).cq_width);
  EXPECT_TRUE(equal(alpha_normalize(c1), alpha_normalize(c2)));
}

TEST(Factories, SortsAreChecked) {
  EXPECT_THROW(diamond(prop("p")), ExprError);
  EXPECT_THROW(conjoin(atomic("a"), prop("p")), ExprError);
  EXPECT_THROW(test(atomic("a")), ExprError);
  EXPECT_THROW(conjunctive({}, "x", "x"), ExprError);
}

TEST(Factories, StructuralEqualityAndHashing) {
  const Expr a = F("<a ; b*> & p");
  const Expr b = F("<a;b*>&p");
  EXPECT_TRUE(equal(a, b));
  EXPECT_EQ(ExprHash{}(a), ExprHash{}(b));
  EXPECT_FALSE(equal(a, F("<a ; b*> & q")));
  // atom order does not matter
  EXPECT_TRUE(equal(P("{a(x,y), b(y,x)}[x,y]"), P("{b(y,x), a(x,y)}[x,y]")));
}

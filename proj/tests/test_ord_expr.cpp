#include <gtest/gtest.h>

#include <random>

#include "smb/errors.hpp"
#include "smb/ord_expr.hpp"

using namespace smb;

namespace {

OrdExpr P(const char* s) { return parse_expr(s); }

// Value of a finite ordinal, checked with search in both directions.
void expect_finite(const SMBTree& t, Natural n) {
  SearchBudget b{20000, 16, 7};
  EXPECT_TRUE(search_le(t.raw(), from_nat(n), b).has_value()) << n;
  EXPECT_TRUE(search_le(from_nat(n), t.raw(), b).has_value()) << n;
}

}  // namespace

TEST(Parse, Atoms) {
  EXPECT_EQ(P("Z").kind(), OrdExpr::Kind::Zero);
  EXPECT_EQ(P("omega").kind(), OrdExpr::Kind::Omega);
  EXPECT_EQ(P("  17 ").value(), 17u);
  EXPECT_EQ(P("x").name(), "x");
}

TEST(Parse, Compound) {
  OrdExpr e = P("max(S Z, lim n. n)");
  OrdExpr want = OrdExpr::max(OrdExpr::succ(OrdExpr::zero()), OrdExpr::lim("n", OrdExpr::var("n")));
  EXPECT_TRUE(e == want);
  EXPECT_TRUE(P("max( S   Z ,lim n.n)") == want);
  EXPECT_FALSE(P("max(S Z, lim m. m)") == want);
}

TEST(Parse, LimBodyExtendsRight) {
  OrdExpr e = P("lim n. max(n, 1)");
  ASSERT_EQ(e.kind(), OrdExpr::Kind::Lim);
  EXPECT_EQ(e.body().kind(), OrdExpr::Kind::Max);
  OrdExpr f = P("max(lim n. n, 3)");
  EXPECT_EQ(f.left().kind(), OrdExpr::Kind::Lim);
}

TEST(Parse, Errors) {
  auto fails_at = [](const char* s, std::size_t pos) {
    try {
      parse_expr(s);
      ADD_FAILURE() << "parsed: " << s;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.position(), pos) << s << ": " << e.what();
      EXPECT_FALSE(e.expected().empty());
    }
  };
  fails_at("", 0);
  fails_at("max(Z Z)", 6);
  fails_at("max(Z, Z", 8);
  fails_at("lim . Z", 4);
  fails_at("lim S. Z", 4);
  fails_at("lim n Z", 6);
  fails_at("S", 1);
  fails_at("Z Z", 2);
  fails_at("(Z)", 0);
  fails_at("99999999999999999999", 0);
  try {
    parse_expr("max(Z Z)");
  } catch (const ParseError& e) {
    EXPECT_EQ(e.expected(), "','");
  }
}

TEST(Parse, DeepNestingIsRejectedNotCrashing) {
  std::string s;
  for (int i = 0; i < 5000; ++i) s += "max(Z, ";
  s += "Z";
  for (int i = 0; i < 5000; ++i) s += ")";
  EXPECT_THROW(parse_expr(s), ParseError);
}

TEST(Parse, LongSuccessorChains) {
  std::string s;
  for (int i = 0; i < 20000; ++i) s += "S ";
  s += "Z";
  OrdExpr e = parse_expr(s);
  EXPECT_EQ(e.size(), 20001u);
  EXPECT_TRUE(parse_expr(print_expr(e)) == e);
}

TEST(Print, Forms) {
  EXPECT_EQ(print_expr(P("max(S Z,lim n.n)")), "max(S Z, lim n. n)");
  EXPECT_EQ(print_expr(P("S S omega")), "S S omega");
}

TEST(Print, RoundtripOnRandomExpressions) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 300; ++i) {
    OrdExpr e = random_expr(rng, ExprShape{4, 3, 9});
    std::string text = print_expr(e);
    EXPECT_TRUE(parse_expr(text) == e) << text;
    EXPECT_EQ(print_expr(parse_expr(text)), text);
  }
}

TEST(FreeVars, Binding) {
  EXPECT_TRUE(free_vars(P("lim n. n")).empty());
  EXPECT_EQ(free_vars(P("max(n, lim n. m)")), (std::set<std::string>{"m", "n"}));
  EXPECT_TRUE(occurs_free(P("lim m. n"), "n"));
  EXPECT_FALSE(occurs_free(P("lim n. n"), "n"));
}

TEST(Elaborate, Finite) {
  EXPECT_EQ(finite_value(elaborate(P("3")).raw()), 3u);
  EXPECT_EQ(finite_value(elaborate(P("S S Z")).raw()), 2u);
  expect_finite(elaborate(P("max(S 2, 1)")), 3);
}

TEST(Elaborate, OmegaIsTheSharedOmega) {
  EXPECT_EQ(elaborate(P("omega")).id(), smb_omega().id());
  EXPECT_TRUE(observationally_equal(elaborate(P("lim n. n")).raw(), smb_omega().raw()));
}

TEST(Elaborate, MaxWithOmega) {
  SMBTree t = elaborate(P("max(2, omega)"));
  auto d = search_le(from_nat(2), t.raw());
  ASSERT_TRUE(d.has_value());
  EXPECT_TRUE(audit(*d).passed());
}

TEST(Elaborate, BinderInstantiatesToFiniteOrdinal) {
  SMBTree t = elaborate(P("lim n. S n"));
  ASSERT_TRUE(t.is_limit());
  for (Natural k : {0, 1, 4}) expect_finite(t.member(IndexElem::nat(k)), k + 1);
}

TEST(Elaborate, NestedBindersSeeOuterIndex) {
  SMBTree t = elaborate(P("lim n. lim m. max(n, m)"));
  SMBTree inner = t.member(IndexElem::nat(4));
  ASSERT_TRUE(inner.is_limit());
  expect_finite(inner.member(IndexElem::nat(1)), 4);
  expect_finite(inner.member(IndexElem::nat(6)), 6);
  // Inner binder shadows the outer one.
  SMBTree s = elaborate(P("lim n. lim n. n"));
  expect_finite(s.member(IndexElem::nat(9)).member(IndexElem::nat(2)), 2);
}

TEST(Elaborate, UnboundVariable) {
  EXPECT_THROW(elaborate(P("x")), UnboundVariable);
  EXPECT_THROW(elaborate(P("max(1, lim n. m)")), UnboundVariable);
}

TEST(Elaborate, WitnessAuditsOnRandomExpressions) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    OrdExpr e = random_expr(rng, ExprShape{3, 1, 5});
    EXPECT_TRUE(elaborate(e).witness_report().passed()) << print_expr(e);
  }
}

TEST(Sugar, DesugarResugar) {
  EXPECT_TRUE(desugar(P("2")) == P("S S Z"));
  EXPECT_TRUE(resugar(P("S S Z")) == P("2"));
  EXPECT_TRUE(resugar(P("S 3")) == P("4"));
  EXPECT_TRUE(resugar(P("S omega")) == P("S omega"));
  EXPECT_TRUE(resugar(P("Z")) == P("Z"));
  EXPECT_TRUE(desugar(P("lim n. max(n, 1)")) == P("lim n. max(n, S Z)"));
}

TEST(Simplify, Examples) {
  EXPECT_EQ(print_expr(simplify(P("max(Z, S Z)")).result), "1");
  auto s = simplify(P("max(S 2, S 3)"));
  EXPECT_EQ(print_expr(s.result), "4");
  ASSERT_FALSE(s.steps.empty());
  EXPECT_EQ(s.steps[0].rule, RewriteRule::SuccDist);
  EXPECT_EQ(print_expr(resugar(s.steps[0].after)), "S max(2, 3)");
  EXPECT_EQ(print_expr(simplify(P("lim n. 5")).result), "5");
}

TEST(Simplify, EachRule) {
  auto first_rule = [](const char* s) { return simplify(P(s)).steps.at(0).rule; };
  EXPECT_EQ(first_rule("max(omega, Z)"), RewriteRule::ZeroRight);
  EXPECT_EQ(first_rule("max(Z, omega)"), RewriteRule::ZeroLeft);
  EXPECT_EQ(first_rule("max(omega, omega)"), RewriteRule::Idem);
  EXPECT_EQ(first_rule("max(omega, max(omega, 1))"), RewriteRule::IdemChain);
  EXPECT_EQ(first_rule("max(omega, S omega)"), RewriteRule::SuccAbsorb);
  EXPECT_EQ(first_rule("max(S omega, omega)"), RewriteRule::SuccAbsorbLeft);
  EXPECT_EQ(first_rule("max(max(omega, x), y)"), RewriteRule::Assoc);
  EXPECT_EQ(first_rule("max(omega, 1)"), RewriteRule::Commut);
  EXPECT_EQ(first_rule("max(omega, max(1, x))"), RewriteRule::LeftCommut);
  EXPECT_EQ(first_rule("lim n. omega"), RewriteRule::ConstLimit);
  EXPECT_TRUE(simplify(P("lim n. n")).steps.empty());
}

TEST(Simplify, NormalFormsAreStable) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    OrdExpr e = random_expr(rng, ExprShape{5, 2, 6});
    auto s = simplify(e);
    EXPECT_TRUE(simplify(s.result).steps.empty()) << print_expr(e) << " -> " << print_expr(s.result);
    EXPECT_LE(s.result.size(), desugar(e).size());
    EXPECT_TRUE(free_vars(s.result).empty());
  }
}

TEST(Simplify, AcNormalizationMergesPermutations) {
  auto a = simplify(P("max(omega, max(3, max(x, 3)))")).result;
  auto b = simplify(P("max(max(x, omega), 3)")).result;
  EXPECT_TRUE(a == b) << print_expr(a) << " vs " << print_expr(b);
}

TEST(Certify, StepsMatchTheirEndpoints) {
  auto s = simplify(P("max(S 2, S 3)"));
  for (const auto& step : s.steps) {
    Equiv e = certify(step);
    EXPECT_TRUE(observationally_equal(e.lhs().raw(), elaborate(step.before).raw()));
    EXPECT_TRUE(observationally_equal(e.rhs().raw(), elaborate(step.after).raw()));
    EXPECT_TRUE(audit(e.fwd.get(), standard_budget()).passed());
    EXPECT_TRUE(audit(e.bwd.get(), standard_budget()).passed());
  }
}

TEST(Certify, UnderBinders) {
  auto s = simplify(P("lim n. max(max(n, Z), S n)"));
  ASSERT_GE(s.steps.size(), 2u);
  EXPECT_EQ(s.steps[0].path, "b");
  for (const auto& step : s.steps) {
    Equiv e = certify(step);
    EXPECT_TRUE(audit(e.fwd.get(), standard_budget()).passed()) << to_string(step.rule);
    EXPECT_TRUE(audit(e.bwd.get(), standard_budget()).passed()) << to_string(step.rule);
  }
  EXPECT_EQ(print_expr(s.result), "lim n. S n");
}

TEST(Certify, RandomExpressions) {
  std::mt19937_64 rng(2024);
  std::size_t steps = 0;
  for (int i = 0; i < 30; ++i) {
    OrdExpr e = random_expr(rng, ExprShape{3, 1, 4});
    for (const auto& step : simplify(e).steps) {
      ++steps;
      Equiv q = certify(step);
      EXPECT_TRUE(audit(q.fwd.get(), standard_budget()).passed()) << print_expr(e) << " " << to_string(step.rule);
      EXPECT_TRUE(audit(q.bwd.get(), standard_budget()).passed()) << print_expr(e) << " " << to_string(step.rule);
    }
  }
  EXPECT_GT(steps, 10u);
}

TEST(RandomExpr, ClosedAndDeterministic) {
  std::mt19937_64 a(3), b(3);
  for (int i = 0; i < 50; ++i) {
    OrdExpr x = random_expr(a);
    EXPECT_TRUE(x == random_expr(b));
    EXPECT_TRUE(free_vars(x).empty());
  }
}

#include <gtest/gtest.h>

#include <random>
#include <utility>

#include "smb/errors.hpp"
#include "smb/unifier.hpp"

using namespace smb;

namespace {

HTree H(const char* s) { return parse_htree(s); }

void expect_value(const SMBTree& t, Natural n) {
  SearchBudget b{20000, 16, 3};
  EXPECT_TRUE(search_le(t.raw(), from_nat(n), b).has_value()) << n;
  EXPECT_TRUE(search_le(from_nat(n), t.raw(), b).has_value()) << n;
}

}  // namespace

TEST(HTreeText, Forms) {
  EXPECT_EQ(H("a").kind(), HTree::Kind::Leaf);
  EXPECT_EQ(H("f()").kind(), HTree::Kind::Node);
  EXPECT_EQ(H("f()").arity(), 0u);
  HTree g = H(" g( a ,h(b) ) ");
  EXPECT_EQ(g.arity(), 2u);
  EXPECT_EQ(print_htree(g), "g(a, h(b))");
  EXPECT_EQ(print_htree(H("iter 3 f a")), "f(f(f(a)))");
  EXPECT_EQ(print_htree(H("fun n. iter n f a")), "fun{a, f(a), f(f(a)), ...}");
  HTree nested = H("fun n. fun m. g(iter n f a, iter m h b)");
  EXPECT_EQ(print_htree(nested.child(2).child(1)), "g(f(f(a)), h(b))");
}

TEST(HTreeText, Errors) {
  EXPECT_THROW(H(""), ParseError);
  EXPECT_THROW(H("f(a"), ParseError);
  EXPECT_THROW(H("f(a,)"), ParseError);
  EXPECT_THROW(H("fun . a"), ParseError);
  EXPECT_THROW(H("iter n f a"), ParseError);
  EXPECT_THROW(H("iter 2 fun a"), ParseError);
  EXPECT_THROW(H("a b"), ParseError);
  try {
    H("f(a b)");
    ADD_FAILURE();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
}

TEST(SizeOf, Finite) {
  EXPECT_EQ(finite_value(size_of(H("a")).raw()), 1u);
  expect_value(size_of(H("g(a, b)")), 2);
  expect_value(size_of(H("g(a, f(b), c)")), 3);
  expect_value(size_of(H("f()")), 1);
  expect_value(size_of(H("iter 6 f a")), 7);
}

TEST(SizeOf, Memoized) {
  HTree h = H("g(a, b)");
  EXPECT_EQ(size_of(h).id(), size_of(h).id());
}

TEST(SizeOf, FunChildrenAreStrictlySmaller) {
  HTree h = H("fun n. iter n f a");
  SmbLt w = child_smaller(h, 5);
  EXPECT_TRUE(audit(w.get().deriv(), standard_budget()).passed());
  EXPECT_TRUE(observationally_equal(w.larger().raw(), size_of(h).raw()));
  // Above every finite size, so at least omega.
  auto d = search_le(smb_omega().raw(), size_core(h).raw(), SearchBudget{20000, 16, 1});
  EXPECT_TRUE(d.has_value());
}

TEST(SizeOf, NodeChildrenAreStrictlySmaller) {
  HTree h = H("g(a, iter 3 f b, c)");
  for (Natural i = 0; i < 3; ++i) {
    SmbLt w = child_smaller(h, i);
    EXPECT_TRUE(audit(w.get().deriv(), standard_budget()).passed()) << i;
  }
}

TEST(Interchange, Audits) {
  SMBTree a = smb_from_nat(2), b = smb_omega(), c = smb_from_nat(5), d = smb_succ(smb_omega());
  Equiv e = join_interchange(a, b, c, d);
  EXPECT_TRUE(audit(e.fwd.get(), standard_budget()).passed());
  EXPECT_TRUE(audit(e.bwd.get(), standard_budget()).passed());
}

TEST(PairDescent, EndsAtTheMetric) {
  HTree a = H("g(a, f(b), fun n. iter n f a)");
  HTree b = H("g(c, f(f(b)), fun n. a)");
  SMBTree metric = smb_max(size_of(a), size_of(b));
  for (Natural i = 0; i < 3; ++i) {
    SmbLt w = pair_descent(a, b, i);
    EXPECT_TRUE(observationally_equal(w.larger().raw(), metric.raw())) << i;
    EXPECT_TRUE(observationally_equal(w.smaller().raw(), smb_max(size_of(a.child(i)), size_of(b.child(i))).raw()));
    EXPECT_TRUE(audit(w.get().deriv(), standard_budget()).passed()) << i;
  }
  EXPECT_THROW(pair_descent(a, H("g(a)"), 0), std::invalid_argument);
}

TEST(Unify, Leaves) {
  auto r = unify(H("a"), H("a"));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(print_htree(*r), "a");
  EXPECT_FALSE(unify(H("a"), H("b")).has_value());
  EXPECT_FALSE(unify(H("a"), H("a()")).has_value());
}

TEST(Unify, Nodes) {
  UnifyStats st;
  auto r = unify(H("g(a, f(b), c())"), H("g(a, f(b), c())"), {}, &st);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(print_htree(*r), "g(a, f(b), c())");
  EXPECT_EQ(st.calls, 5u);
  EXPECT_EQ(st.descents, 4u);
  EXPECT_FALSE(unify(H("g(a, b)"), H("g(a, c)")).has_value());
  EXPECT_FALSE(unify(H("g(a, b)"), H("g(a)")).has_value());
  EXPECT_FALSE(unify(H("g(a)"), H("h(a)")).has_value());
}

TEST(Unify, Funs) {
  auto r = unify(H("fun n. iter n f a"), H("fun m. iter m f a"));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(print_htree(*r), "fun{a, f(a), f(f(a)), ...}");
  // Past the probed prefix, children are unified when read.
  EXPECT_EQ(print_htree(r->child(6)), print_htree(H("iter 6 f a")));
  EXPECT_FALSE(unify(H("fun n. iter n f a"), H("fun n. iter n g a")).has_value());
  auto late = unify(H("fun n. iter n f a"), H("fun n. iter n f iter 0 f a"), UnifyOptions{2});
  ASSERT_TRUE(late.has_value());
  auto diverge = unify(H("fun n. g(iter n f a)"), H("fun n. g(iter n f b)"), UnifyOptions{0});
  ASSERT_TRUE(diverge.has_value());
  EXPECT_THROW(diverge->child(0), UnifyFailure);
}

TEST(Unify, CorruptedDescentIsCaught) {
  // A witness for the wrong child pair does not start at the call's metric.
  HTree a = H("g(a, iter 4 f a)");
  std::function<SMBTree(const std::pair<HTree, HTree>&)> metric = [](const auto& p) {
    return smb_max(size_of(p.first), size_of(p.second));
  };
  using R = int;
  std::function<R(const std::pair<HTree, HTree>&, const std::function<R(const std::pair<HTree, HTree>&, const SmbLt&)>&)>
      step = [&](const auto& x, const auto& recur) -> R {
    if (x.first.kind() != HTree::Kind::Node || x.first.arity() != 2) return 0;
    return recur({x.first.child(1), x.second.child(1)}, pair_descent(x.first, x.second, 0));
  };
  using In = std::pair<HTree, HTree>;
  EXPECT_THROW((audited_fix<In, R>(metric, step, In{a, a})), DescentViolation);
}

TEST(Unify, RandomPairsTerminateSymmetrically) {
  std::mt19937_64 rng(0xC0FFEE);
  int unified = 0;
  for (int i = 0; i < 40; ++i) {
    HTree a = random_htree(rng, 5, true);
    HTree b = rng() % 3 == 0 ? random_htree(rng, 5, true) : mutate_htree(a, rng(), 0.05);
    UnifyStats st;
    auto r1 = unify(a, b, {}, &st);
    auto r2 = unify(b, a);
    ASSERT_EQ(r1.has_value(), r2.has_value()) << print_htree(a) << " / " << print_htree(b);
    if (r1) {
      ++unified;
      EXPECT_TRUE(htree_equal(*r1, *r2));
      EXPECT_TRUE(htree_equal(*r1, a));
    }
    EXPECT_EQ(st.descents + 1, st.calls) << "every call but the first descends";
  }
  EXPECT_GT(unified, 5);
}

TEST(RandomHTree, Deterministic) {
  std::mt19937_64 a(9), b(9);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(print_htree(random_htree(a, 5, true)), print_htree(random_htree(b, 5, true)));
  HTree h = H("g(a, b, c)");
  EXPECT_TRUE(htree_equal(mutate_htree(h, 4, 0.0), h));
  EXPECT_FALSE(htree_equal(mutate_htree(h, 4, 1.0), h));
}

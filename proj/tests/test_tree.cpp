#include <gtest/gtest.h>

#include "smb/tree.hpp"

using namespace smb;

TEST(Tree, FromNat) {
  EXPECT_TRUE(from_nat(0).is_zero());
  Tree three = from_nat(3);
  EXPECT_TRUE(three.is_succ() && three.pred().is_succ() && three.pred().pred().is_succ());
  EXPECT_TRUE(three.pred().pred().pred().is_zero());
  for (Natural k = 0; k <= 100; ++k) EXPECT_EQ(finite_value(from_nat(k)), k);
}

TEST(Tree, FiniteValueOfLimits) {
  EXPECT_EQ(finite_value(Tree()), 0u);
  EXPECT_EQ(finite_value(Tree::lim(IndexCode::fin(0), [](const IndexElem&) { return from_nat(9); })), 0u);
  Tree t = Tree::lim(IndexCode::fin(3), [](const IndexElem& i) { return from_nat(i.value()); });
  EXPECT_EQ(finite_value(t), 2u);
  Tree reversed = Tree::lim(IndexCode::fin(3), [](const IndexElem& i) { return from_nat(2 - i.value()); });
  EXPECT_EQ(finite_value(reversed), finite_value(t));
  EXPECT_FALSE(finite_value(nlim(from_nat)).has_value());
}

TEST(Tree, NlimAndMemoizedBranches) {
  Tree z = nlim([](Natural) { return Tree(); });
  ASSERT_TRUE(z.is_lim());
  EXPECT_EQ(z.code(), IndexCode::nat());
  EXPECT_TRUE(z.branch(IndexElem::nat(4)).is_zero());

  Tree omega = nlim(from_nat);
  Tree b = omega.branch(IndexElem::nat(5));
  EXPECT_TRUE(b.identical(omega.branch(IndexElem::nat(5))));
  EXPECT_EQ(finite_value(b), 5u);
  EXPECT_THROW(omega.branch(IndexElem::fin(0)), std::exception);
}

TEST(Tree, ObservationalEquality) {
  EXPECT_TRUE(observationally_equal(from_nat(4), from_nat(4)));
  EXPECT_FALSE(observationally_equal(from_nat(4), from_nat(5)));
  EXPECT_TRUE(observationally_equal(nlim(from_nat), nlim(from_nat)));
  EXPECT_FALSE(observationally_equal(nlim(from_nat), nlim([](Natural n) { return from_nat(n + 1); })));
}

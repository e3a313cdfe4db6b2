#include <gtest/gtest.h>

#include "smb/errors.hpp"
#include "smb/join.hpp"

using namespace smb;

namespace {

Tree omega() { return nlim(from_nat); }
Tree omega_plus(Natural k) {
  return nlim([k](Natural n) { return from_nat(n + k); });
}
// Limit of limits: n |-> omega + n-ish nested family.
Tree nested() {
  return nlim([](Natural n) { return nlim([n](Natural m) { return from_nat(n + m); }); });
}

Natural fv(const Tree& t) { return *finite_value(t); }

void expect_pass(const LeDeriv& d) {
  AuditReport r = audit(d);
  EXPECT_TRUE(r.passed()) << r.summary();
}

}  // namespace

TEST(LimMax, Basics) {
  Tree zz = lim_max(Tree(), Tree());
  EXPECT_TRUE(search_le(zz, Tree()).has_value());
  EXPECT_TRUE(search_le(Tree(), zz).has_value());

  LeDeriv left = lim_max_bound(Side::Left, from_nat(2), from_nat(3));
  EXPECT_EQ(left.rule(), Rule::Cocone);
  EXPECT_EQ(left.witness(), nat_iso().inv(0));
  expect_pass(left);
  expect_pass(lim_max_bound(Side::Right, from_nat(2), from_nat(3)));
  expect_pass(lim_max_bound(Side::Left, omega(), Tree()));

  LeDeriv lub = lim_max_lub(*search_le(from_nat(2), from_nat(5)), *search_le(from_nat(3), from_nat(5)));
  EXPECT_EQ(fv(lub.rhs()), 5u);
  expect_pass(lub);
  LeDeriv lub3 = lim_max_lub(*search_le(from_nat(2), from_nat(3)), le_refl(from_nat(3)));
  expect_pass(lub3);
  EXPECT_THROW(lim_max_lub(le_refl(from_nat(2)), le_refl(from_nat(3))), InvalidComposition);

  expect_pass(lim_max_idem(Tree()));
  expect_pass(lim_max_idem(omega()));
  expect_pass(lim_max_commut(from_nat(1), omega()));
  expect_pass(lim_max_mono(*search_le(from_nat(1), from_nat(4)), *search_le(from_nat(2), omega())));
}

TEST(LimMax, SuccessorOfJoinOnlyReachesByCocone) {
  for (auto [a, b] : std::vector<std::pair<Natural, Natural>>{{0, 1}, {1, 2}, {2, 3}}) {
    Tree lhs = Tree::succ(lim_max(from_nat(a), from_nat(a)));
    Tree rhs = lim_max(from_nat(b), from_nat(b));
    auto d = search_le(lhs, rhs);
    ASSERT_TRUE(d.has_value()) << a << "," << b;
    EXPECT_EQ(d->rule(), Rule::Cocone);
  }
  // At zero there is nothing to lift: Z is below anything by the zero rule.
  auto z = search_le(lim_max(Tree(), Tree()), lim_max(Tree(), Tree()));
  ASSERT_TRUE(z.has_value());
  EXPECT_NE(z->rule(), Rule::SucMono);
}

TEST(IndMax, Views) {
  EXPECT_EQ(ind_max_view(Tree(), omega()), IndMaxView::ZL);
  EXPECT_EQ(ind_max_view(omega(), Tree()), IndMaxView::ZR);
  EXPECT_EQ(ind_max_view(Tree(), Tree()), IndMaxView::ZL);
  EXPECT_EQ(ind_max_view(omega(), from_nat(1)), IndMaxView::LimL);
  EXPECT_EQ(ind_max_view(omega(), omega()), IndMaxView::LimL);
  EXPECT_EQ(ind_max_view(from_nat(1), omega()), IndMaxView::LimR);
  EXPECT_EQ(ind_max_view(from_nat(1), from_nat(1)), IndMaxView::SucSuc);
}

TEST(IndMax, Structure) {
  Tree t = omega();
  EXPECT_TRUE(ind_max(Tree(), t).identical(t));
  EXPECT_TRUE(ind_max(t, Tree()).identical(t));
  Tree m = ind_max(Tree::succ(from_nat(2)), Tree::succ(t));
  ASSERT_TRUE(m.is_succ());
  EXPECT_EQ(fv(ind_max(from_nat(3), from_nat(5))), 5u);
  for (Natural a = 0; a <= 8; ++a)
    for (Natural b = 0; b <= 8; ++b) EXPECT_EQ(fv(ind_max(from_nat(a), from_nat(b))), std::max(a, b));
}

TEST(IndMax, Bounds) {
  LeDeriv l = ind_max_bound(Side::Left, from_nat(3), from_nat(5));
  expect_pass(l);
  EXPECT_TRUE(*decide_le_finite(l.lhs(), l.rhs()));
  expect_pass(ind_max_bound(Side::Right, from_nat(3), from_nat(5)));
  Tree maybe_lim = Tree::lim(IndexCode::maybe(IndexCode::fin(0)), [](const IndexElem&) { return Tree(); });
  expect_pass(ind_max_bound(Side::Right, from_nat(1), maybe_lim));
  expect_pass(ind_max_bound(Side::Left, from_nat(1), maybe_lim));
  expect_pass(ind_max_bound(Side::Left, omega(), from_nat(4)));
  expect_pass(ind_max_bound(Side::Right, omega(), from_nat(4)));
  expect_pass(ind_max_bound(Side::Left, from_nat(4), nested()));

  Tree empty = Tree::lim(IndexCode::fin(0), [](const IndexElem&) { return Tree(); });
  EXPECT_THROW(under_lim(Tree(), empty, [](const IndexElem&) { return le_refl(Tree()); }), EmptyIndex);
  EXPECT_THROW(ind_max_bound(Side::Left, from_nat(1), empty), EmptyIndex);
}

TEST(IndMax, Mono) {
  expect_pass(ind_max_mono(le_refl(from_nat(2)), le_refl(omega())));
  LtWitness w1(*search_le(from_nat(2), from_nat(2)));
  LtWitness w2(*search_le(from_nat(4), from_nat(4)));
  LtWitness s = ind_max_strict_mono(w1, w2);
  EXPECT_EQ(fv(s.smaller()), 3u);
  EXPECT_EQ(fv(s.larger()), 4u);
  expect_pass(s.deriv());
  LtWitness w3(*search_le(from_nat(6), omega()));
  expect_pass(ind_max_strict_mono(w1, w3).deriv());
  expect_pass(ind_max_strict_mono(w3, w1).deriv());
  expect_pass(ind_max_mono(*search_le(from_nat(3), omega()), *search_le(omega(), omega_plus(2))));
}

TEST(IndMax, AssocCommutSwap) {
  expect_pass(ind_max_commut(Tree(), omega()));
  expect_pass(ind_max_commut(omega(), from_nat(5)));
  expect_pass(ind_max_commut(nested(), omega()));
  LeDeriv al = ind_max_assoc(AssocDir::Left, from_nat(1), from_nat(2), from_nat(3));
  EXPECT_EQ(fv(al.lhs()), 3u);
  EXPECT_EQ(fv(al.rhs()), 3u);
  expect_pass(al);
  expect_pass(ind_max_assoc(AssocDir::Right, omega(), from_nat(2), nested()));
  expect_pass(ind_max_assoc(AssocDir::Left, from_nat(2), omega(), from_nat(1)));
  LeDeriv sw = ind_max_swap4(from_nat(1), from_nat(2), from_nat(3), from_nat(4));
  EXPECT_EQ(fv(sw.lhs()), 4u);
  EXPECT_EQ(fv(sw.rhs()), 4u);
  expect_pass(sw);
  expect_pass(ind_max_swap4(omega(), from_nat(2), omega(), from_nat(4)));
}

TEST(InfJoin, Iterates) {
  EXPECT_TRUE(n_ind_max(omega(), 0).is_zero());
  EXPECT_EQ(fv(n_ind_max(from_nat(2), 3)), 2u);
  EXPECT_EQ(fv(n_ind_max(Tree(), 5)), 0u);
  Tree inf = ind_max_inf(from_nat(3));
  EXPECT_TRUE(inf.branch(nat_iso().inv(0)).is_zero());
  for (Natural n = 0; n < 20; ++n) EXPECT_LE(fv(inf.branch(nat_iso().inv(n))), 3u);
}

TEST(InfJoin, Lemmas) {
  expect_pass(inf_self(Tree()));
  expect_pass(inf_self(omega()));
  expect_pass(inf_mono(le_refl(omega())));
  expect_pass(inf_mono(*search_le(from_nat(2), from_nat(5))));
  expect_pass(inf_idem(Tree()));
  expect_pass(inf_idem(from_nat(3)));
  expect_pass(inf_idem(omega()));
  expect_pass(inf_idem1(omega()));
  expect_pass(inf_idem_n(omega(), 4));
  expect_pass(inf_collapse(LeDeriv::zero(Tree(), Tree())));
  expect_pass(inf_collapse(le_refl(from_nat(1))));
  InfJoin j(from_nat(2));
  LeDeriv chain = le_trans(j.self(), j.collapse(le_refl(from_nat(2))));
  expect_pass(chain);
}

TEST(InfJoin, NestedLimits) {
  expect_pass(inf_idem(nested()));
  expect_pass(inf_idem(ind_max(omega(), nested())));
}

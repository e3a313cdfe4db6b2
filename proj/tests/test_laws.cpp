#include <gtest/gtest.h>

#include "smb/errors.hpp"
#include "smb/laws.hpp"

using namespace smb;

namespace {

void expect_pass(const SmbLe& d) {
  AuditReport r = audit(d.get(), standard_budget());
  EXPECT_TRUE(r.passed()) << r.summary();
}

void expect_equiv(const Equiv& e) {
  expect_pass(e.fwd);
  expect_pass(e.bwd);
  EXPECT_EQ(e.fwd.lhs().id(), e.bwd.rhs().id());
  EXPECT_EQ(e.fwd.rhs().id(), e.bwd.lhs().id());
}

SMBTree nat(Natural n) { return smb_from_nat(n); }

SmbLe le(Natural a, Natural b) { return SmbLe::make(nat(a), nat(b), *search_le(from_nat(a), from_nat(b))); }

std::optional<Natural> fv(const SMBTree& t) { return finite_value(t.raw()); }

// Limits of SMB-trees iterate over an infinite code, so their value is
// checked through derivations in both directions.
void expect_value(const SMBTree& t, Natural n) {
  auto down = search_le(t.raw(), from_nat(n));
  auto up = search_le(from_nat(n), t.raw());
  EXPECT_TRUE(down.has_value()) << "not <= " << n;
  EXPECT_TRUE(up.has_value()) << "not >= " << n;
}

SMBTree fin_family(std::vector<Natural> values) {
  IndexCode c = IndexCode::fin(values.size());
  return smb_lim(c, [values, c](const IndexElem& k) { return nat(values.at(position_of(c, k))); });
}

}  // namespace

TEST(Equiv, OrdConversions) {
  expect_equiv(ord_to_equiv(smb_le_refl(nat(2))));
  Equiv e = ord_to_equiv(le(2, 3));
  expect_equiv(e);
  EXPECT_EQ(fv(e.lhs()), 3u);
  EXPECT_EQ(fv(e.rhs()), 3u);
  SmbLe back = equiv_to_ord(nat(2), e);
  expect_pass(back);
  EXPECT_EQ(fv(back.lhs()), 2u);
  EXPECT_EQ(fv(back.rhs()), 3u);
}

TEST(Equiv, Relation) {
  SMBTree w = smb_omega();
  Equiv r = equiv_refl(w);
  expect_equiv(r);
  Equiv c = join_commut(w, nat(5));
  expect_equiv(equiv_symm(c));
  expect_equiv(equiv_trans(c, join_commut(nat(5), w)));
}

TEST(Congruence, Basics) {
  expect_equiv(succ_cong(equiv_refl(nat(3))));
  Equiv m = max_cong(equiv_refl(nat(2)), equiv_refl(nat(3)));
  expect_equiv(m);
  EXPECT_EQ(fv(m.lhs()), 3u);

  // 1 < 3 transported across 3 ~ 3 v 3
  SMBTree three = nat(3);
  Equiv idem = equiv_symm(join_idem(three));
  SmbLt one_lt_three = SmbLt::make(nat(1), three, LtWitness(*search_le(from_nat(2), from_nat(3))));
  SmbLt moved = lt_resp(equiv_refl(nat(1)), one_lt_three, idem);
  AuditReport r = audit(moved.get().deriv(), standard_budget());
  EXPECT_TRUE(r.passed()) << r.summary();
  EXPECT_EQ(fv(moved.larger()), 3u);

  SmbLe kept = le_resp(equiv_refl(nat(1)), le(1, 3), idem);
  expect_pass(kept);

  SMBTree f = smb_nlim([](Natural n) { return nat(n); });
  SMBTree g = smb_nlim([](Natural n) { return smb_max(nat(n), nat(n)); });
  expect_equiv(lim_cong(f, g, [f, g](const IndexElem& k) { return equiv_symm(join_idem(f.member(k))); }));
}

TEST(JoinLaws, Examples) {
  expect_equiv(join_idem(smb_zero()));
  Equiv a = join_assoc(nat(1), nat(2), nat(3));
  expect_equiv(a);
  EXPECT_EQ(fv(a.lhs()), 3u);
  EXPECT_EQ(fv(a.rhs()), 3u);
  expect_equiv(join_commut(smb_omega(), nat(5)));
  expect_equiv(join_assoc(smb_omega(), nat(1), smb_omega()));
  expect_equiv(join_idem(smb_omega()));
}

TEST(SuccLaws, Examples) {
  Equiv ab = succ_absorb(smb_zero());
  expect_equiv(ab);
  EXPECT_EQ(fv(ab.lhs()), 1u);
  Equiv d = succ_dist(nat(2), nat(3));
  expect_equiv(d);
  EXPECT_EQ(fv(d.lhs()), 4u);
  EXPECT_EQ(fv(d.rhs()), 4u);
  expect_equiv(succ_dist(smb_omega(), nat(2)));
  expect_equiv(succ_absorb(smb_omega()));
}

TEST(LimitLaws, Examples) {
  Equiv empty = sup_empty(IndexCode::fin(0));
  expect_equiv(empty);
  EXPECT_THROW(sup_empty(IndexCode::fin(2)), NonEmptyIndex);

  Equiv c = sup_const(IndexCode::fin(3), nat(5), IndexElem::fin(1));
  expect_equiv(c);
  expect_value(c.lhs(), 5);
  EXPECT_THROW(sup_const(IndexCode::fin(0), nat(5), std::nullopt), EmptyIndex);

  SMBTree ident = smb_nlim([](Natural n) { return nat(n); });
  Equiv het = dist_het(ident, nat(3), nat_iso().inv(0));
  expect_equiv(het);
  EXPECT_THROW(dist_het(ident, nat(3), std::nullopt), EmptyIndex);

  SMBTree f = fin_family({1, 4, 2});
  expect_value(f, 4);
  Equiv b = sup_bound(f, IndexElem::fin(2));
  expect_equiv(b);
  expect_value(b.lhs(), 4);

  expect_equiv(dist_homo(f, fin_family({3, 0, 5})));
  expect_equiv(dist_homo(ident, smb_nlim([](Natural n) { return nat(n + 1); })));

  SMBTree bound = smb_succ(smb_omega());
  Equiv sup = sup_supremum(ident, bound, [ident, bound](const IndexElem& k) {
    SMBTree fk = ident.member(k);
    return ord_to_equiv(SmbLe::make(fk, bound, *search_le(fk.raw(), bound.raw())));
  });
  expect_equiv(sup);
}

TEST(LimitLaws, StrictConstraintEncoding) {
  // t1 < t2 as succ t1 v t2 ~ t2
  for (auto [a, b] : {std::pair<Natural, Natural>{0, 1}, {2, 5}}) {
    SmbLe d = SmbLe::make(smb_succ(nat(a)), nat(b), *search_le(from_nat(a + 1), from_nat(b)));
    expect_equiv(ord_to_equiv(d));
  }
  SMBTree w = smb_omega();
  SmbLe below = smb_le_upper_bound(w, nat_iso().inv(4));
  SmbLe strict = smb_le_trans(SmbLe::make(smb_succ(nat(3)), nat(4), le_refl(from_nat(4))), below);
  expect_equiv(ord_to_equiv(strict));
}

TEST(LawSuite, SmallRun) {
  EXPECT_EQ(law_names().size(), 11u);
  LawSuiteOptions opts;
  opts.trials = 4;
  for (const LawSummary& s : run_law_suite(opts)) {
    EXPECT_EQ(s.passed, s.cases) << s.law << (s.failures.empty() ? "" : ": " + s.failures[0].operands);
  }
  std::mt19937_64 rng(1);
  EXPECT_THROW(run_law_case("no_such_law", rng), std::invalid_argument);
}

TEST(LawSuite, SameSeedSameOperands) {
  std::mt19937_64 a(9), b(9);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(run_law_case("dist_het", a).operands, run_law_case("dist_het", b).operands);
}

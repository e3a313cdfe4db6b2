#include "smb/laws.hpp"

#include <chrono>
#include <stdexcept>

#include "smb/errors.hpp"

namespace smb {

using detail::trans_unchecked;

Equiv equiv_refl(const SMBTree& t) { return Equiv{smb_le_refl(t), smb_le_refl(t)}; }

Equiv equiv_symm(const Equiv& e) { return Equiv{e.bwd, e.fwd}; }

Equiv equiv_trans(const Equiv& e1, const Equiv& e2) {
  return Equiv{smb_le_trans(e1.fwd, e2.fwd), smb_le_trans(e2.bwd, e1.bwd)};
}

Equiv ord_to_equiv(const SmbLe& d) {
  SMBTree m = smb_max(d.lhs(), d.rhs());
  return Equiv{smb_max_lub(m, d, smb_le_refl(d.rhs())), smb_max_bound(Side::Right, d.lhs(), d.rhs(), m)};
}

SmbLe equiv_to_ord(const SMBTree& t1, const Equiv& e) {
  return smb_le_trans(smb_max_bound(Side::Left, t1, e.rhs(), e.lhs()), e.fwd);
}

// ---- congruences -------------------------------------------------------------

SmbLe le_resp(const Equiv& a, const SmbLe& d, const Equiv& b) {
  return smb_le_trans(smb_le_trans(a.bwd, d), b.fwd);
}

SmbLt lt_resp(const Equiv& a, const SmbLt& w, const Equiv& b) {
  return smb_le_then_lt(a.bwd, smb_lt_then_le(w, b.fwd));
}

Equiv succ_cong(const Equiv& e) {
  SMBTree s1 = smb_succ(e.lhs());
  SMBTree s2 = smb_succ(e.rhs());
  return Equiv{SmbLe::unchecked(s1, s2, LeDeriv::suc_mono(s1.raw(), s2.raw(), e.fwd.get())),
               SmbLe::unchecked(s2, s1, LeDeriv::suc_mono(s2.raw(), s1.raw(), e.bwd.get()))};
}

Equiv lim_cong(const SMBTree& lim1, const SMBTree& lim2, const std::function<Equiv(const IndexElem&)>& per_k) {
  if (!(lim1.limit_code() == lim2.limit_code())) throw InvalidComposition("lim_cong: limits over different codes");
  SmbLe fwd = smb_le_least(lim1, lim2, [lim2, per_k](const IndexElem& k) {
    return smb_le_trans(per_k(k).fwd, smb_le_upper_bound(lim2, k));
  });
  SmbLe bwd = smb_le_least(lim2, lim1, [lim1, per_k](const IndexElem& k) {
    return smb_le_trans(per_k(k).bwd, smb_le_upper_bound(lim1, k));
  });
  return Equiv{fwd, bwd};
}

Equiv max_cong(const Equiv& e1, const Equiv& e2) {
  SMBTree m1 = smb_max(e1.lhs(), e2.lhs());
  SMBTree m2 = smb_max(e1.rhs(), e2.rhs());
  return Equiv{smb_max_mono(e1.fwd, e2.fwd, m1, m2), smb_max_mono(e1.bwd, e2.bwd, m2, m1)};
}

// ---- semilattice laws ------------------------------------------------------------

Equiv join_assoc(const SMBTree& t1, const SMBTree& t2, const SMBTree& t3) {
  SMBTree a = smb_max(t1, smb_max(t2, t3));
  SMBTree b = smb_max(smb_max(t1, t2), t3);
  const Tree& r1 = t1.raw();
  const Tree& r2 = t2.raw();
  const Tree& r3 = t3.raw();
  return Equiv{SmbLe::unchecked(a, b, detail::assoc(AssocDir::Left, r1, r2, r3, a.raw(), b.raw())),
               SmbLe::unchecked(b, a, detail::assoc(AssocDir::Right, r1, r2, r3, b.raw(), a.raw()))};
}

Equiv join_commut(const SMBTree& t1, const SMBTree& t2) {
  SMBTree m12 = smb_max(t1, t2);
  SMBTree m21 = smb_max(t2, t1);
  return Equiv{SmbLe::unchecked(m12, m21, detail::commut(t1.raw(), t2.raw(), m12.raw(), m21.raw())),
               SmbLe::unchecked(m21, m12, detail::commut(t2.raw(), t1.raw(), m21.raw(), m12.raw()))};
}

Equiv join_idem(const SMBTree& t) {
  SMBTree m = smb_max(t, t);
  return Equiv{SmbLe::unchecked(m, t, t.witness()), smb_max_bound(Side::Left, t, t, m)};
}

Equiv succ_absorb(const SMBTree& t) {
  SMBTree s = smb_succ(t);
  SMBTree m = smb_max(t, s);
  const LeDeriv& idem = s.witness();
  LeDeriv up = detail::mono(le_succ_self(t.raw()), le_refl(s.raw()), m.raw(), idem.lhs());
  return Equiv{SmbLe::unchecked(m, s, trans_unchecked(up, idem)), smb_max_bound(Side::Right, t, s, m)};
}

Equiv succ_dist(const SMBTree& t1, const SMBTree& t2) {
  SMBTree m = smb_max(t1, t2);
  SMBTree sm = smb_succ(m);
  SMBTree s1 = smb_succ(t1);
  SMBTree s2 = smb_succ(t2);
  SMBTree r = smb_max(s1, s2);
  SmbLe fwd = SmbLe::unchecked(sm, r, LeDeriv::suc_mono(sm.raw(), r.raw(), le_refl_eq(m.raw(), r.raw().pred())));
  auto lift = [&](Side side, const SMBTree& s) {
    SmbLe b = smb_max_bound(side, t1, t2, m);
    return SmbLe::unchecked(s, sm, LeDeriv::suc_mono(s.raw(), sm.raw(), b.get()));
  };
  return Equiv{fwd, smb_max_lub(r, lift(Side::Left, s1), lift(Side::Right, s2))};
}

// ---- limit laws ------------------------------------------------------------------

Equiv sup_bound(const SMBTree& lim, const IndexElem& k) { return ord_to_equiv(smb_le_upper_bound(lim, k)); }

Equiv sup_supremum(const SMBTree& lim, const SMBTree& t, const std::function<Equiv(const IndexElem&)>& per_k) {
  return ord_to_equiv(smb_le_least(lim, t, [lim, per_k](const IndexElem& k) {
    return equiv_to_ord(lim.member(k), per_k(k));
  }));
}

Equiv sup_const(const IndexCode& c, const SMBTree& t, const std::optional<IndexElem>& inhabitant) {
  if (!inhabitant) throw EmptyIndex("sup_const needs an element of " + c.to_string());
  if (!belongs_to(*inhabitant, c)) {
    throw InvalidComposition("index " + inhabitant->to_string() + " outside code " + c.to_string());
  }
  SMBTree lim = smb_lim(c, [t](const IndexElem&) { return t; });
  SmbLe fwd = smb_le_least(lim, t, [t](const IndexElem&) { return smb_le_refl(t); });
  return Equiv{fwd, smb_le_upper_bound(lim, *inhabitant)};
}

Equiv sup_empty(const IndexCode& c) {
  if (cardinality_hint(c).kind != Cardinality::Kind::Empty) {
    throw NonEmptyIndex("sup_empty over inhabited code " + c.to_string());
  }
  SMBTree lim = smb_lim(c, [](const IndexElem& k) -> SMBTree {
    throw InvalidComposition("empty code has no element " + k.to_string());
  });
  SMBTree z = smb_zero();
  SmbLe fwd = smb_le_least(lim, z, [](const IndexElem& k) -> SmbLe {
    throw InvalidComposition("empty code has no element " + k.to_string());
  });
  return Equiv{fwd, SmbLe::unchecked(z, lim, LeDeriv::zero(z.raw(), lim.raw()))};
}

Equiv dist_homo(const SMBTree& lim_f, const SMBTree& lim_g) {
  const IndexCode& c = lim_f.limit_code();
  if (!(c == lim_g.limit_code())) throw InvalidComposition("dist_homo: limits over different codes");
  SMBTree h = smb_lim(c, [lim_f, lim_g](const IndexElem& k) { return smb_max(lim_f.member(k), lim_g.member(k)); });
  SMBTree m = smb_max(lim_f, lim_g);
  auto into_h = [lim_f, lim_g, h](Side side) {
    const SMBTree& lim = side == Side::Left ? lim_f : lim_g;
    return smb_le_least(lim, h, [lim_f, lim_g, h, side](const IndexElem& k) {
      return smb_le_trans(smb_max_bound(side, lim_f.member(k), lim_g.member(k), h.member(k)), smb_le_upper_bound(h, k));
    });
  };
  SmbLe fwd = smb_max_lub(m, into_h(Side::Left), into_h(Side::Right));
  SmbLe bwd = smb_le_least(h, m, [lim_f, lim_g, h, m](const IndexElem& k) {
    return smb_max_mono(smb_le_upper_bound(lim_f, k), smb_le_upper_bound(lim_g, k), h.member(k), m);
  });
  return Equiv{fwd, bwd};
}

Equiv dist_het(const SMBTree& lim_f, const SMBTree& t, const std::optional<IndexElem>& inhabitant) {
  const IndexCode& c = lim_f.limit_code();
  if (!inhabitant) throw EmptyIndex("dist_het needs an element of " + c.to_string());
  if (!belongs_to(*inhabitant, c)) {
    throw InvalidComposition("index " + inhabitant->to_string() + " outside code " + c.to_string());
  }
  SMBTree h = smb_lim(c, [lim_f, t](const IndexElem& k) { return smb_max(lim_f.member(k), t); });
  SMBTree m = smb_max(lim_f, t);
  SmbLe f_into_h = smb_le_least(lim_f, h, [lim_f, t, h](const IndexElem& k) {
    return smb_le_trans(smb_max_bound(Side::Left, lim_f.member(k), t, h.member(k)), smb_le_upper_bound(h, k));
  });
  const IndexElem& k0 = *inhabitant;
  SmbLe t_into_h = smb_le_trans(smb_max_bound(Side::Right, lim_f.member(k0), t, h.member(k0)), smb_le_upper_bound(h, k0));
  SmbLe fwd = smb_max_lub(m, f_into_h, t_into_h);
  SmbLe bwd = smb_le_least(h, m, [lim_f, t, h, m](const IndexElem& k) {
    return smb_max_mono(smb_le_upper_bound(lim_f, k), smb_le_refl(t), h.member(k), m);
  });
  return Equiv{fwd, bwd};
}

// ---- randomized law suite ----------------------------------------------------------

const std::vector<std::string>& law_names() {
  static const std::vector<std::string> names = {"assoc",     "commut",       "idem",      "succ_absorb",
                                                 "succ_dist", "sup_bound",    "sup_supremum", "sup_const",
                                                 "sup_empty", "dist_homo",    "dist_het"};
  return names;
}

namespace {

Natural pick(std::mt19937_64& rng, Natural n) { return rng() % n; }

std::string succs(Natural a, const std::string& body) {
  std::string out;
  for (Natural i = 0; i < a; ++i) out += "S ";
  return out + body;
}

SMBTree succ_n(SMBTree t, Natural a) {
  for (Natural i = 0; i < a; ++i) t = smb_succ(t);
  return t;
}

// A family over `c` with its description. Over nat: shifted identity, a
// join of the index with an operand, or a constant; over fin m: a list.
struct RandomFamily {
  std::string text;
  IndexCode code;
  Family f;
};

RandomFamily random_family(std::mt19937_64& rng, const IndexCode& c, int depth) {
  if (cardinality_hint(c).kind == Cardinality::Kind::CountablyInfinite) {
    switch (pick(rng, 3)) {
      case 0: {
        Natural a = pick(rng, 3);
        return {"lim n. " + succs(a, "n"), c, [a](const IndexElem& k) { return smb_from_nat(nat_iso().fun(k) + a); }};
      }
      case 1: {
        Operand x = random_operand(rng, depth - 1);
        SMBTree xt = x.tree;
        return {"lim n. max(n, " + x.text + ")", c,
                [xt](const IndexElem& k) { return smb_max(smb_from_nat(nat_iso().fun(k)), xt); }};
      }
      default: {
        Operand x = random_operand(rng, depth - 1);
        SMBTree xt = x.tree;
        return {"lim n. " + x.text, c, [xt](const IndexElem&) { return xt; }};
      }
    }
  }
  Cardinality card = cardinality_hint(c);
  std::vector<SMBTree> members;
  std::string text = c.to_string() + " [";
  for (Natural i = 0; i < card.count; ++i) {
    Operand x = random_operand(rng, depth - 1);
    if (i) text += ", ";
    text += x.text;
    members.push_back(x.tree);
  }
  text += "]";
  return {text, c, [members, c](const IndexElem& k) { return members.at(position_of(c, k)); }};
}

IndexCode random_code(std::mt19937_64& rng) {
  return pick(rng, 3) == 0 ? IndexCode::fin(1 + pick(rng, 4)) : IndexCode::nat();
}

IndexElem random_element(std::mt19937_64& rng, const IndexCode& c) {
  Cardinality card = cardinality_hint(c);
  Natural bound = card.kind == Cardinality::Kind::Finite ? card.count : 12;
  return element_at(c, pick(rng, bound));
}

}  // namespace

Operand random_operand(std::mt19937_64& rng, int depth) {
  Natural choice = depth <= 0 ? pick(rng, 4) : pick(rng, 10);
  switch (choice) {
    case 0:
    case 1:
    case 2: {
      Natural n = pick(rng, 7);
      return {std::to_string(n), smb_from_nat(n)};
    }
    case 3:
    case 4:
      return {"omega", smb_omega()};
    case 5:
    case 6: {
      Operand x = random_operand(rng, depth - 1);
      return {"S " + x.text, smb_succ(x.tree)};
    }
    case 7:
    case 8: {
      Operand a = random_operand(rng, depth - 1);
      Operand b = random_operand(rng, depth - 1);
      return {"max(" + a.text + ", " + b.text + ")", smb_max(a.tree, b.tree)};
    }
    default: {
      RandomFamily fam = random_family(rng, IndexCode::nat(), depth);
      return {fam.text, smb_lim(fam.code, fam.f)};
    }
  }
}

namespace {

struct Built {
  std::string operands;
  Equiv equiv;
};

Built build_case(const std::string& law, std::mt19937_64& rng) {
  if (law == "assoc") {
    Operand a = random_operand(rng), b = random_operand(rng), c = random_operand(rng);
    return {a.text + "; " + b.text + "; " + c.text, join_assoc(a.tree, b.tree, c.tree)};
  }
  if (law == "commut") {
    Operand a = random_operand(rng), b = random_operand(rng);
    return {a.text + "; " + b.text, join_commut(a.tree, b.tree)};
  }
  if (law == "idem") {
    Operand a = random_operand(rng);
    return {a.text, join_idem(a.tree)};
  }
  if (law == "succ_absorb") {
    Operand a = random_operand(rng);
    return {a.text, succ_absorb(a.tree)};
  }
  if (law == "succ_dist") {
    Operand a = random_operand(rng), b = random_operand(rng);
    return {a.text + "; " + b.text, succ_dist(a.tree, b.tree)};
  }
  if (law == "sup_bound") {
    RandomFamily fam = random_family(rng, random_code(rng), 1);
    IndexElem k = random_element(rng, fam.code);
    return {fam.text + " @ " + k.to_string(), sup_bound(smb_lim(fam.code, fam.f), k)};
  }
  if (law == "sup_supremum") {
    // f n = n + a (or max(n, c) with finite c) lies below t = omega + b.
    Natural a = pick(rng, 3), b = pick(rng, 3), c = pick(rng, 5);
    bool joined = pick(rng, 2) == 0;
    SMBTree ct = smb_from_nat(c);
    Family f = [joined, a, ct](const IndexElem& k) {
      Natural n = nat_iso().fun(k);
      return joined ? smb_max(smb_from_nat(n), ct) : smb_from_nat(n + a);
    };
    SMBTree lim = smb_lim(IndexCode::nat(), f);
    SMBTree t = succ_n(smb_omega(), b);
    std::string text = (joined ? "lim n. max(n, " + std::to_string(c) + ")" : "lim n. " + succs(a, "n")) + "; " +
                       succs(b, "omega");
    auto per_k = [lim, t](const IndexElem& k) {
      SMBTree fk = lim.member(k);
      auto d = search_le(fk.raw(), t.raw());
      if (!d) throw SearchFailure("no derivation of a family member below the bound");
      return ord_to_equiv(SmbLe::make(fk, t, *d));
    };
    return {text, sup_supremum(lim, t, per_k)};
  }
  if (law == "sup_const") {
    IndexCode c = random_code(rng);
    Operand t = random_operand(rng);
    IndexElem k = random_element(rng, c);
    return {c.to_string() + " const " + t.text + " @ " + k.to_string(), sup_const(c, t.tree, k)};
  }
  if (law == "sup_empty") {
    return {"fin 0", sup_empty(IndexCode::fin(0))};
  }
  if (law == "dist_homo") {
    IndexCode c = random_code(rng);
    RandomFamily f = random_family(rng, c, 1);
    RandomFamily g = random_family(rng, c, 1);
    return {f.text + "; " + g.text, dist_homo(smb_lim(c, f.f), smb_lim(c, g.f))};
  }
  if (law == "dist_het") {
    IndexCode c = random_code(rng);
    RandomFamily f = random_family(rng, c, 1);
    Operand t = random_operand(rng);
    IndexElem k = random_element(rng, c);
    return {f.text + "; " + t.text + " @ " + k.to_string(), dist_het(smb_lim(c, f.f), t.tree, k)};
  }
  throw std::invalid_argument("unknown law '" + law + "'");
}

std::uint64_t law_seed(std::uint64_t seed, const std::string& law) {
  std::uint64_t h = seed;
  for (char ch : law) h = mix_seed(h ^ static_cast<unsigned char>(ch));
  return h;
}

}  // namespace

LawCase run_law_case(const std::string& law, std::mt19937_64& rng, const AuditBudget& budget) {
  LawCase out;
  out.law = law;
  std::optional<Built> built;
  try {
    built.emplace(build_case(law, rng));
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    out.error = e.what();
    return out;
  }
  out.operands = built->operands;
  out.fwd = audit(built->equiv.fwd.get(), budget);
  out.bwd = audit(built->equiv.bwd.get(), budget);
  return out;
}

std::vector<LawSummary> run_law_suite(const LawSuiteOptions& opts) {
  std::vector<std::string> laws = opts.laws.empty() ? law_names() : opts.laws;
  std::vector<LawSummary> out;
  for (const std::string& law : laws) {
    LawSummary s;
    s.law = law;
    std::mt19937_64 rng(law_seed(opts.seed, law));
    auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < opts.trials; ++i) {
      LawCase c = run_law_case(law, rng, opts.budget);
      ++s.cases;
      if (c.passed()) {
        ++s.passed;
        continue;
      }
      bool exhausted = c.error.empty() && c.fwd.verdict != Verdict::Fail && c.bwd.verdict != Verdict::Fail;
      ++(exhausted ? s.exhausted : s.failed);
      if (s.failures.size() < 5) s.failures.push_back(std::move(c));
    }
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace smb

#include "smb/join.hpp"

#include "smb/errors.hpp"

namespace smb {

using detail::trans_unchecked;

// ---- limit-based maximum -----------------------------------------------------

Tree lim_max(const Tree& t1, const Tree& t2) {
  return nlim([t1, t2](Natural n) { return n == 0 ? t1 : t2; });
}

LeDeriv lim_max_bound(Side side, const Tree& t1, const Tree& t2) {
  Tree m = lim_max(t1, t2);
  if (side == Side::Left) return LeDeriv::cocone(t1, m, nat_iso().inv(0), le_refl(t1));
  return LeDeriv::cocone(t2, m, nat_iso().inv(1), le_refl(t2));
}

LeDeriv lim_max_mono(const LeDeriv& d1, const LeDeriv& d2) {
  Tree l = lim_max(d1.lhs(), d2.lhs());
  Tree r = lim_max(d1.rhs(), d2.rhs());
  return LeDeriv::limiting(l, r, [l, r, d1, d2](const IndexElem& k) {
    if (nat_iso().fun(k) == 0) return LeDeriv::cocone(l.branch(k), r, k, d1);
    return LeDeriv::cocone(l.branch(k), r, k, d2);
  });
}

LeDeriv lim_max_commut(const Tree& t1, const Tree& t2) {
  Tree l = lim_max(t1, t2);
  Tree r = lim_max(t2, t1);
  return LeDeriv::limiting(l, r, [l, r, t1, t2](const IndexElem& k) {
    if (nat_iso().fun(k) == 0) return LeDeriv::cocone(t1, r, nat_iso().inv(1), le_refl(t1));
    return LeDeriv::cocone(t2, r, nat_iso().inv(0), le_refl(t2));
  });
}

LeDeriv lim_max_idem(const Tree& t) {
  Tree l = lim_max(t, t);
  return LeDeriv::limiting(l, t, [t](const IndexElem&) { return le_refl(t); });
}

LeDeriv lim_max_lub(const LeDeriv& d1, const LeDeriv& d2) {
  if (!observationally_equal(d1.rhs(), d2.rhs())) {
    throw InvalidComposition("lim_max_lub: the two bounds have different upper ends");
  }
  Tree l = lim_max(d1.lhs(), d2.lhs());
  return LeDeriv::limiting(l, d1.rhs(), [d1, d2](const IndexElem& k) { return nat_iso().fun(k) == 0 ? d1 : d2; });
}

// ---- inductive maximum -------------------------------------------------------

std::string to_string(IndMaxView v) {
  switch (v) {
    case IndMaxView::ZL:
      return "ZL";
    case IndMaxView::ZR:
      return "ZR";
    case IndMaxView::LimL:
      return "LimL";
    case IndMaxView::LimR:
      return "LimR";
    case IndMaxView::SucSuc:
      return "SucSuc";
  }
  return "?";
}

IndMaxView ind_max_view(const Tree& t1, const Tree& t2) {
  if (t1.is_zero()) return IndMaxView::ZL;
  if (t2.is_zero()) return IndMaxView::ZR;
  if (t1.is_lim()) return IndMaxView::LimL;
  if (t2.is_lim()) return IndMaxView::LimR;
  return IndMaxView::SucSuc;
}

Tree ind_max(const Tree& t1, const Tree& t2) {
  switch (ind_max_view(t1, t2)) {
    case IndMaxView::ZL:
      return t2;
    case IndMaxView::ZR:
      return t1;
    case IndMaxView::LimL:
      return Tree::lim(t1.code(), [t1, t2](const IndexElem& k) { return ind_max(t1.branch(k), t2); });
    case IndMaxView::LimR:
      return Tree::lim(t2.code(), [t1, t2](const IndexElem& k) { return ind_max(t1, t2.branch(k)); });
    case IndMaxView::SucSuc: {
      // Long successor chains: peel them iteratively.
      Natural depth = 0;
      const Tree* a = &t1;
      const Tree* b = &t2;
      while (a->is_succ() && b->is_succ()) {
        ++depth;
        a = &a->pred();
        b = &b->pred();
      }
      Tree inner = ind_max(*a, *b);
      for (Natural i = 0; i < depth; ++i) inner = Tree::succ(std::move(inner));
      return inner;
    }
  }
  throw std::logic_error("unreachable");
}

LeDeriv under_lim(const Tree& t, const Tree& lim, const IndexElem& witness, const LeDeriv::Branches& per_k) {
  if (!lim.is_lim()) throw InvalidComposition("under_lim needs a limit");
  return LeDeriv::cocone_deferred(t, lim, witness, [per_k, witness] { return per_k(witness); });
}

LeDeriv under_lim(const Tree& t, const Tree& lim, const LeDeriv::Branches& per_k) {
  if (!lim.is_lim()) throw InvalidComposition("under_lim needs a limit");
  return under_lim(t, lim, default_element(lim.code()), per_k);
}

namespace detail {

LeDeriv bound_left(const Tree& t1, const Tree& t2, const Tree& rhs) {
  switch (ind_max_view(t1, t2)) {
    case IndMaxView::ZL:
      return LeDeriv::zero(t1, rhs);
    case IndMaxView::ZR:
      return le_refl_eq(t1, rhs);
    case IndMaxView::LimL:
      return LeDeriv::limiting(t1, rhs, [t1, t2, rhs](const IndexElem& k) {
        Tree fk = t1.branch(k);
        return LeDeriv::cocone_deferred(fk, rhs, k, [fk, t2, rhs, k] { return bound_left(fk, t2, rhs.branch(k)); });
      });
    case IndMaxView::LimR:
      return under_lim(t1, rhs, [t1, t2, rhs](const IndexElem& k) {
        return bound_left(t1, t2.branch(k), rhs.branch(k));
      });
    case IndMaxView::SucSuc:
      return LeDeriv::suc_mono_deferred(t1, rhs, [t1, t2, rhs] { return bound_left(t1.pred(), t2.pred(), rhs.pred()); });
  }
  throw std::logic_error("unreachable");
}

LeDeriv bound_right(const Tree& t1, const Tree& t2, const Tree& rhs) {
  switch (ind_max_view(t1, t2)) {
    case IndMaxView::ZL:
      return le_refl_eq(t2, rhs);
    case IndMaxView::ZR:
      return LeDeriv::zero(t2, rhs);
    case IndMaxView::LimL:
      return under_lim(t2, rhs, [t1, t2, rhs](const IndexElem& k) {
        return bound_right(t1.branch(k), t2, rhs.branch(k));
      });
    case IndMaxView::LimR:
      return LeDeriv::limiting(t2, rhs, [t1, t2, rhs](const IndexElem& k) {
        Tree gk = t2.branch(k);
        return LeDeriv::cocone_deferred(gk, rhs, k, [t1, gk, rhs, k] { return bound_right(t1, gk, rhs.branch(k)); });
      });
    case IndMaxView::SucSuc:
      return LeDeriv::suc_mono_deferred(t2, rhs, [t1, t2, rhs] { return bound_right(t1.pred(), t2.pred(), rhs.pred()); });
  }
  throw std::logic_error("unreachable");
}

LeDeriv mono(const LeDeriv& d1, const LeDeriv& d2, const Tree& lhs, const Tree& rhs) {
  const Tree& a = d1.lhs();
  const Tree& b = d2.lhs();
  const Tree& a2 = d1.rhs();
  const Tree& b2 = d2.rhs();
  switch (ind_max_view(a, b)) {
    case IndMaxView::ZL:
      return trans_unchecked(d2, bound_right(a2, b2, rhs));
    case IndMaxView::ZR:
      return trans_unchecked(d1, bound_left(a2, b2, rhs));
    case IndMaxView::LimL:
      return LeDeriv::limiting(lhs, rhs, [d1, d2, a, lhs, rhs](const IndexElem& k) {
        Tree fk = a.branch(k);
        LeDeriv fk_le = trans_unchecked(LeDeriv::cocone(fk, a, k, le_refl(fk)), d1);
        return mono(fk_le, d2, lhs.branch(k), rhs);
      });
    case IndMaxView::LimR:
      return LeDeriv::limiting(lhs, rhs, [d1, d2, b, lhs, rhs](const IndexElem& k) {
        Tree gk = b.branch(k);
        LeDeriv gk_le = trans_unchecked(LeDeriv::cocone(gk, b, k, le_refl(gk)), d2);
        return mono(d1, gk_le, lhs.branch(k), rhs);
      });
    case IndMaxView::SucSuc:
      if (d1.rule() == Rule::SucMono && d2.rule() == Rule::SucMono) {
        return LeDeriv::suc_mono_deferred(lhs, rhs, [d1, d2, lhs, rhs] { return mono(d1.sub(), d2.sub(), lhs.pred(), rhs.pred()); });
      }
      if (d1.rule() == Rule::Cocone && rhs.is_lim() && ind_max_view(a2, b2) == IndMaxView::LimL) {
        const IndexElem& j = d1.witness();
        return LeDeriv::cocone_deferred(lhs, rhs, j, [d1, d2, lhs, rhs, j] { return mono(d1.sub(), d2, lhs, rhs.branch(j)); });
      }
      if (d1.rule() == Rule::SucMono && d2.rule() == Rule::Cocone && rhs.is_lim() &&
          ind_max_view(a2, b2) == IndMaxView::LimR) {
        const IndexElem& j = d2.witness();
        return LeDeriv::cocone_deferred(lhs, rhs, j, [d1, d2, lhs, rhs, j] { return mono(d1, d2.sub(), lhs, rhs.branch(j)); });
      }
      throw InvalidComposition("ind_max_mono: cannot combine " + to_string(d1.rule()) + " with " +
                               to_string(d2.rule()) + " under successors");
  }
  throw std::logic_error("unreachable");
}

LeDeriv commut(const Tree& t1, const Tree& t2, const Tree& lhs, const Tree& rhs) {
  switch (ind_max_view(t1, t2)) {
    case IndMaxView::ZL:
    case IndMaxView::ZR:
      return le_refl_eq(lhs, rhs);
    case IndMaxView::LimL:
      return LeDeriv::limiting(lhs, rhs, [t1, t2, lhs, rhs](const IndexElem& k) {
        Tree fk = t1.branch(k);
        Tree mid = ind_max(t2, fk);
        LeDeriv swap = commut(fk, t2, lhs.branch(k), mid);
        LeDeriv up = mono(le_refl(t2), LeDeriv::cocone(fk, t1, k, le_refl(fk)), mid, rhs);
        return trans_unchecked(swap, up);
      });
    case IndMaxView::LimR:
      return LeDeriv::limiting(lhs, rhs, [t1, t2, lhs, rhs](const IndexElem& k) {
        Tree gk = t2.branch(k);
        Tree mid = ind_max(gk, t1);
        LeDeriv swap = commut(t1, gk, lhs.branch(k), mid);
        LeDeriv up = mono(LeDeriv::cocone(gk, t2, k, le_refl(gk)), le_refl(t1), mid, rhs);
        return trans_unchecked(swap, up);
      });
    case IndMaxView::SucSuc:
      return LeDeriv::suc_mono_deferred(lhs, rhs, [t1, t2, lhs, rhs] { return commut(t1.pred(), t2.pred(), lhs.pred(), rhs.pred()); });
  }
  throw std::logic_error("unreachable");
}

namespace {

// Both sides of the association, between `a` = t1 v (t2 v t3) and
// `b` = (t1 v t2) v t3.
LeDeriv assoc_core(AssocDir dir, const Tree& t1, const Tree& t2, const Tree& t3, const Tree& a, const Tree& b) {
  const Tree& from = dir == AssocDir::Left ? a : b;
  const Tree& to = dir == AssocDir::Left ? b : a;
  if (t1.is_zero() || t2.is_zero() || t3.is_zero()) return le_refl_eq(from, to);
  auto pointwise = [&](auto next) {
    return LeDeriv::limiting(from, to, [from, to, next](const IndexElem& k) {
      return LeDeriv::cocone_deferred(from.branch(k), to, k, [next, k] { return next(k); });
    });
  };
  if (t1.is_lim()) {
    return pointwise([dir, t1, t2, t3, a, b](const IndexElem& k) {
      return assoc_core(dir, t1.branch(k), t2, t3, a.branch(k), b.branch(k));
    });
  }
  if (t2.is_lim()) {
    return pointwise([dir, t1, t2, t3, a, b](const IndexElem& k) {
      return assoc_core(dir, t1, t2.branch(k), t3, a.branch(k), b.branch(k));
    });
  }
  if (t3.is_lim()) {
    return pointwise([dir, t1, t2, t3, a, b](const IndexElem& k) {
      return assoc_core(dir, t1, t2, t3.branch(k), a.branch(k), b.branch(k));
    });
  }
  return LeDeriv::suc_mono_deferred(from, to, [dir, t1, t2, t3, a, b] { return assoc_core(dir, t1.pred(), t2.pred(), t3.pred(), a.pred(), b.pred()); });
}

}  // namespace

LeDeriv assoc(AssocDir dir, const Tree& t1, const Tree& t2, const Tree& t3, const Tree& lhs, const Tree& rhs) {
  if (dir == AssocDir::Left) return assoc_core(dir, t1, t2, t3, lhs, rhs);
  return assoc_core(dir, t1, t2, t3, rhs, lhs);
}

LeDeriv swap4(const Tree& a, const Tree& b, const Tree& c, const Tree& d, const Tree& lhs, const Tree& rhs) {
  Tree cd = ind_max(c, d);
  Tree bc = ind_max(b, c);
  Tree cb = ind_max(c, b);
  Tree bd = ind_max(b, d);
  Tree b_cd = ind_max(b, cd);
  Tree bc_d = ind_max(bc, d);
  Tree cb_d = ind_max(cb, d);
  Tree c_bd = ind_max(c, bd);
  Tree s1 = ind_max(a, b_cd);
  Tree s2 = ind_max(a, bc_d);
  Tree s3 = ind_max(a, cb_d);
  Tree s4 = ind_max(a, c_bd);

  LeDeriv step1 = assoc(AssocDir::Right, a, b, cd, lhs, s1);
  LeDeriv inner2 = assoc(AssocDir::Left, b, c, d, b_cd, bc_d);
  LeDeriv step2 = mono(le_refl(a), inner2, s1, s2);
  LeDeriv inner3 = mono(commut(b, c, bc, cb), le_refl(d), bc_d, cb_d);
  LeDeriv step3 = mono(le_refl(a), inner3, s2, s3);
  LeDeriv inner4 = assoc(AssocDir::Right, c, b, d, cb_d, c_bd);
  LeDeriv step4 = mono(le_refl(a), inner4, s3, s4);
  LeDeriv step5 = assoc(AssocDir::Left, a, c, bd, s4, rhs);
  return trans_unchecked(trans_unchecked(trans_unchecked(trans_unchecked(step1, step2), step3), step4), step5);
}

}  // namespace detail

LeDeriv ind_max_bound(Side side, const Tree& t1, const Tree& t2) {
  Tree m = ind_max(t1, t2);
  return side == Side::Left ? detail::bound_left(t1, t2, m) : detail::bound_right(t1, t2, m);
}

LeDeriv ind_max_mono(const LeDeriv& d1, const LeDeriv& d2) {
  return detail::mono(d1, d2, ind_max(d1.lhs(), d2.lhs()), ind_max(d1.rhs(), d2.rhs()));
}

LeDeriv ind_max_mono_left(const LeDeriv& d, const Tree& t) { return ind_max_mono(d, le_refl(t)); }

LeDeriv ind_max_mono_right(const Tree& t, const LeDeriv& d) { return ind_max_mono(le_refl(t), d); }

LtWitness ind_max_strict_mono(const LtWitness& w1, const LtWitness& w2) {
  const LeDeriv& d1 = w1.deriv();
  const LeDeriv& d2 = w2.deriv();
  return LtWitness(detail::mono(d1, d2, ind_max(d1.lhs(), d2.lhs()), ind_max(d1.rhs(), d2.rhs())));
}

LeDeriv ind_max_assoc(AssocDir dir, const Tree& t1, const Tree& t2, const Tree& t3) {
  Tree a = ind_max(t1, ind_max(t2, t3));
  Tree b = ind_max(ind_max(t1, t2), t3);
  return dir == AssocDir::Left ? detail::assoc(dir, t1, t2, t3, a, b) : detail::assoc(dir, t1, t2, t3, b, a);
}

LeDeriv ind_max_commut(const Tree& t1, const Tree& t2) {
  return detail::commut(t1, t2, ind_max(t1, t2), ind_max(t2, t1));
}

LeDeriv ind_max_swap4(const Tree& a, const Tree& b, const Tree& c, const Tree& d) {
  return detail::swap4(a, b, c, d, ind_max(ind_max(a, b), ind_max(c, d)), ind_max(ind_max(a, c), ind_max(b, d)));
}

// ---- iterated self-join ------------------------------------------------------

Tree n_ind_max(const Tree& t, Natural n) {
  Tree acc;
  for (Natural i = 0; i < n; ++i) acc = ind_max(acc, t);
  return acc;
}

namespace {

struct Chain {
  Tree base;
  IndexCode code;
  std::mutex mutex;
  std::vector<Tree> iterates;  // iterates[n] = n_ind_max(base, n)

  Chain(Tree b, IndexCode c) : base(std::move(b)), code(std::move(c)) { iterates.push_back(Tree()); }

  Tree iterate(Natural n) {
    std::lock_guard lock(mutex);
    while (iterates.size() <= n) iterates.push_back(ind_max(iterates.back(), base));
    return iterates[n];
  }
};

}  // namespace

struct InfJoin::State {
  std::shared_ptr<Chain> chain;
  Tree tree;
  std::mutex mutex;
  std::vector<LeDeriv> idem_n;
  std::optional<LeDeriv> idem1;
};

InfJoin::InfJoin(Tree base, IndexCode nat_code) : state_(std::make_shared<State>()) {
  if (cardinality_hint(nat_code).kind != Cardinality::Kind::CountablyInfinite) {
    throw std::invalid_argument("InfJoin needs an infinite code");
  }
  auto chain = std::make_shared<Chain>(std::move(base), nat_code);
  state_->chain = chain;
  state_->tree = Tree::lim(nat_code, [chain](const IndexElem& e) { return chain->iterate(position_of(chain->code, e)); });
}

const Tree& InfJoin::base() const { return state_->chain->base; }
const Tree& InfJoin::tree() const { return state_->tree; }
const IndexCode& InfJoin::code() const { return state_->chain->code; }
Tree InfJoin::iterate(Natural n) const { return state_->chain->iterate(n); }

LeDeriv InfJoin::self() const {
  const Tree& t = tree();
  IndexElem one = element_at(code(), 1);
  return LeDeriv::cocone(base(), t, one, le_refl_eq(base(), t.branch(one)));
}

LeDeriv InfJoin::idem1() const {
  {
    std::lock_guard lock(state_->mutex);
    if (state_->idem1) return *state_->idem1;
  }
  const Tree& t = tree();
  LeDeriv result = [&] {
    if (base().is_zero()) return le_refl(t);
    Tree lhs = ind_max(t, base());
    auto chain = state_->chain;
    return LeDeriv::limiting(lhs, t, [chain, lhs, t](const IndexElem& e) {
      Natural n = position_of(chain->code, e);
      Tree next = chain->iterate(n + 1);
      return LeDeriv::cocone(lhs.branch(e), t, element_at(chain->code, n + 1), le_refl_eq(lhs.branch(e), next));
    });
  }();
  std::lock_guard lock(state_->mutex);
  if (!state_->idem1) state_->idem1 = result;
  return *state_->idem1;
}

LeDeriv InfJoin::idem_n(Natural n) const {
  const Tree& t = tree();
  Natural have;
  {
    std::lock_guard lock(state_->mutex);
    if (n < state_->idem_n.size()) return state_->idem_n[n];
    have = state_->idem_n.size();
  }
  std::optional<LeDeriv> prev;
  if (have == 0) {
    // Right-zero absorption: ind_max(t, Zero) is t itself.
    prev = le_refl(ind_max(t, Tree()));
    std::lock_guard lock(state_->mutex);
    if (state_->idem_n.empty()) state_->idem_n.push_back(*prev);
    have = 1;
  } else {
    std::lock_guard lock(state_->mutex);
    prev = state_->idem_n[have - 1];
  }
  LeDeriv one = idem1();
  const Tree& s = base();
  for (Natural m = have - 1; m < n; ++m) {
    // t v N(m+1) = t v (N(m) v s) <= t v (s v N(m)) <= (t v s) v N(m) <= t v N(m) <= t
    Tree nm = iterate(m);
    Tree nm1 = iterate(m + 1);
    Tree s_nm = ind_max(s, nm);
    Tree p0 = ind_max(t, nm1);
    Tree p1 = ind_max(t, s_nm);
    Tree ts = one.lhs();
    Tree p2 = ind_max(ts, nm);
    const Tree& p3 = prev->lhs();
    LeDeriv c1 = detail::mono(le_refl(t), detail::commut(nm, s, nm1, s_nm), p0, p1);
    LeDeriv c2 = detail::assoc(AssocDir::Left, t, s, nm, p1, p2);
    LeDeriv c3 = detail::mono(one, le_refl(nm), p2, p3);
    LeDeriv next = trans_unchecked(trans_unchecked(trans_unchecked(c1, c2), c3), *prev);
    std::lock_guard lock(state_->mutex);
    if (state_->idem_n.size() == m + 1) state_->idem_n.push_back(next);
    prev = state_->idem_n[m + 1];
  }
  return *prev;
}

LeDeriv InfJoin::idem() const {
  const Tree& t = tree();
  Tree lhs = ind_max(t, t);
  InfJoin self_copy = *this;
  return LeDeriv::limiting(lhs, t, [self_copy, lhs, t](const IndexElem& e) {
    Natural n = position_of(self_copy.code(), e);
    LeDeriv back = self_copy.idem_n(n);
    return trans_unchecked(detail::commut(self_copy.iterate(n), t, lhs.branch(e), back.lhs()), back);
  });
}

LeDeriv InfJoin::collapse(const LeDeriv& d) const {
  const Tree& s = base();
  if (!observationally_equal(d.rhs(), s) || !observationally_equal(d.lhs(), ind_max(s, s))) {
    throw InvalidComposition("collapse expects a proof of ind_max(t, t) <= t for the base tree");
  }
  InfJoin self_copy = *this;
  auto table = std::make_shared<std::pair<std::mutex, std::vector<LeDeriv>>>();
  table->second.push_back(LeDeriv::zero(Tree(), s));
  return LeDeriv::limiting(tree(), s, [self_copy, table, d, s](const IndexElem& e) {
    Natural n = position_of(self_copy.code(), e);
    std::lock_guard lock(table->first);
    auto& v = table->second;
    while (v.size() <= n) {
      Natural m = v.size() - 1;
      LeDeriv up = detail::mono(v[m], le_refl(s), self_copy.iterate(m + 1), d.lhs());
      v.push_back(trans_unchecked(up, d));
    }
    return v[n];
  });
}

LeDeriv inf_mono(const LeDeriv& d, const InfJoin& from, const InfJoin& to) {
  if (!observationally_equal(d.lhs(), from.base()) || !observationally_equal(d.rhs(), to.base())) {
    throw InvalidComposition("inf_mono: derivation endpoints do not match the iterated trees");
  }
  auto table = std::make_shared<std::pair<std::mutex, std::vector<LeDeriv>>>();
  table->second.push_back(LeDeriv::zero(Tree(), Tree()));
  return LeDeriv::limiting(from.tree(), to.tree(), [d, from, to, table](const IndexElem& e) {
    Natural n = position_of(from.code(), e);
    std::lock_guard lock(table->first);
    auto& v = table->second;
    while (v.size() <= n) {
      Natural m = v.size() - 1;
      v.push_back(detail::mono(v[m], d, from.iterate(m + 1), to.iterate(m + 1)));
    }
    return LeDeriv::cocone(from.iterate(n), to.tree(), element_at(to.code(), n), v[n]);
  });
}

Tree ind_max_inf(const Tree& t) { return InfJoin(t).tree(); }
LeDeriv inf_self(const Tree& t) { return InfJoin(t).self(); }
LeDeriv inf_mono(const LeDeriv& d) { return inf_mono(d, InfJoin(d.lhs()), InfJoin(d.rhs())); }
LeDeriv inf_idem1(const Tree& t) { return InfJoin(t).idem1(); }
LeDeriv inf_idem_n(const Tree& t, Natural n) { return InfJoin(t).idem_n(n); }
LeDeriv inf_idem(const Tree& t) { return InfJoin(t).idem(); }
LeDeriv inf_collapse(const LeDeriv& d) { return InfJoin(d.rhs()).collapse(d); }

}  // namespace smb

#include "smb/smb_tree.hpp"

#include <atomic>
#include <map>
#include <mutex>

#include "smb/errors.hpp"

namespace smb {

using detail::trans_unchecked;

namespace {

#ifdef SMB_PARANOID
std::atomic<WitnessPolicy> g_policy{WitnessPolicy::Eager};
#else
std::atomic<WitnessPolicy> g_policy{WitnessPolicy::Lazy};
#endif

struct FamilyMemo {
  Family f;
  std::mutex mutex;
  std::map<IndexElem, SMBTree> members;

  explicit FamilyMemo(Family fn) : f(std::move(fn)) {}

  SMBTree get(const IndexElem& k) {
    {
      std::lock_guard lock(mutex);
      if (auto it = members.find(k); it != members.end()) return it->second;
    }
    SMBTree value = f(k);
    std::lock_guard lock(mutex);
    return members.try_emplace(k, std::move(value)).first->second;
  }
};

}  // namespace

void set_witness_policy(WitnessPolicy p) { g_policy.store(p); }
WitnessPolicy witness_policy() { return g_policy.load(); }

AuditBudget standard_budget() { return AuditBudget{100000, 16, 0xC0FFEE}; }

struct SMBTree::State {
  Tree raw;
  std::function<LeDeriv()> make_witness;
  std::once_flag witness_once;
  std::optional<LeDeriv> witness;
  std::once_flag audit_once;
  std::optional<AuditReport> report;

  bool is_limit = false;
  std::optional<IndexCode> code;
  std::shared_ptr<FamilyMemo> family;
  Tree wrapped;
  std::optional<InfJoin> iteration;
};

SMBTree make_smb(std::shared_ptr<SMBTree::State> s) {
  SMBTree t(std::move(s));
  if (witness_policy() == WitnessPolicy::Eager) t.is_idem();
  return t;
}

namespace {

std::shared_ptr<SMBTree::State> new_state(Tree raw, std::function<LeDeriv()> make_witness) {
  auto s = std::make_shared<SMBTree::State>();
  s->raw = std::move(raw);
  s->make_witness = std::move(make_witness);
  return s;
}

}  // namespace

const Tree& SMBTree::raw() const { return state_->raw; }

const LeDeriv& SMBTree::witness() const {
  std::call_once(state_->witness_once, [this] {
    state_->witness = state_->make_witness();
    state_->make_witness = nullptr;
  });
  return *state_->witness;
}

const AuditReport& SMBTree::witness_report() const {
  std::call_once(state_->audit_once, [this] { state_->report = audit(witness(), standard_budget()); });
  return *state_->report;
}

const LeDeriv& SMBTree::is_idem() const {
  const AuditReport& r = witness_report();
  if (r.verdict == Verdict::Fail) throw InvalidWitness("idempotence witness rejected: " + r.summary());
  return witness();
}

bool SMBTree::is_limit() const { return state_->is_limit; }

const IndexCode& SMBTree::limit_code() const {
  if (!state_->is_limit) throw InvalidComposition("not a limit SMB-tree");
  return *state_->code;
}

SMBTree SMBTree::member(const IndexElem& k) const {
  if (!state_->is_limit) throw InvalidComposition("not a limit SMB-tree");
  if (!belongs_to(k, *state_->code)) {
    throw InvalidComposition("index " + k.to_string() + " outside code " + state_->code->to_string());
  }
  return state_->family->get(k);
}

const Tree& SMBTree::wrapped_limit() const {
  if (!state_->is_limit) throw InvalidComposition("not a limit SMB-tree");
  return state_->wrapped;
}

const InfJoin& SMBTree::iteration() const {
  if (!state_->is_limit) throw InvalidComposition("not a limit SMB-tree");
  return *state_->iteration;
}

SMBTree SMBTree::checked(Tree raw, LeDeriv witness, const AuditBudget& budget) {
  if (!observationally_equal(witness.rhs(), raw) || !observationally_equal(witness.lhs(), ind_max(raw, raw))) {
    throw InvalidWitness("witness endpoints are not ind_max(t, t) and t");
  }
  AuditReport r = audit(witness, budget);
  if (!r.passed()) throw InvalidWitness("idempotence witness rejected: " + r.summary());
  auto s = new_state(std::move(raw), nullptr);
  s->witness = std::move(witness);
  std::call_once(s->witness_once, [] {});
  if (budget.max_nodes == standard_budget().max_nodes && budget.samples_per_limiting == standard_budget().samples_per_limiting &&
      budget.seed == standard_budget().seed) {
    s->report = r;
    std::call_once(s->audit_once, [] {});
  }
  return SMBTree(std::move(s));
}

// ---- constructors ------------------------------------------------------------

SMBTree smb_zero() {
  static const SMBTree zero = [] {
    return make_smb(new_state(Tree(), [] { return LeDeriv::zero(Tree(), Tree()); }));
  }();
  return zero;
}

SMBTree smb_succ(const SMBTree& t) {
  Tree raw = Tree::succ(t.raw());
  return make_smb(new_state(raw, [t, raw] {
    // ind_max(Succ a, Succ a) is Succ(ind_max(a, a)), the child's witness lhs.
    const LeDeriv& w = t.witness();
    return LeDeriv::suc_mono(Tree::succ(w.lhs()), raw, w);
  }));
}

SMBTree smb_lim(const IndexCode& c, Family f) {
  auto family = std::make_shared<FamilyMemo>(std::move(f));
  Tree wrapped = Tree::lim(IndexCode::maybe(c), [family](const IndexElem& e) {
    return e.is_nothing() ? Tree() : family->get(e.inner()).raw();
  });
  InfJoin iteration(wrapped, IndexCode::maybe(IndexCode::nat()));
  auto s = new_state(iteration.tree(), [iteration] { return iteration.idem(); });
  s->is_limit = true;
  s->code = c;
  s->family = family;
  s->wrapped = wrapped;
  s->iteration = iteration;
  return make_smb(std::move(s));
}

SMBTree smb_nlim(std::function<SMBTree(Natural)> seq) {
  return smb_lim(IndexCode::nat(), [seq = std::move(seq)](const IndexElem& e) { return seq(nat_iso().fun(e)); });
}

SMBTree smb_from_nat(Natural n) {
  // Small naturals and omega are shared, so that separately elaborated
  // occurrences are the same nodes.
  static const std::vector<SMBTree> small = [] {
    std::vector<SMBTree> v{smb_zero()};
    for (int i = 1; i < 64; ++i) v.push_back(smb_succ(v.back()));
    return v;
  }();
  if (n < small.size()) return small[n];
  SMBTree t = small.back();
  for (Natural i = small.size() - 1; i < n; ++i) t = smb_succ(t);
  return t;
}

SMBTree smb_omega() {
  static const SMBTree omega = smb_nlim([](Natural n) { return smb_from_nat(n); });
  return omega;
}

// ---- ordering ------------------------------------------------------------------

SmbLe SmbLe::make(SMBTree lhs, SMBTree rhs, LeDeriv d) {
  if (!observationally_equal(d.lhs(), lhs.raw()) || !observationally_equal(d.rhs(), rhs.raw())) {
    throw InvalidComposition("derivation endpoints are not the raw trees");
  }
  return SmbLe(std::move(lhs), std::move(rhs), std::move(d));
}

SmbLe SmbLe::unchecked(SMBTree lhs, SMBTree rhs, LeDeriv d) {
  return SmbLe(std::move(lhs), std::move(rhs), std::move(d));
}

SmbLt SmbLt::make(SMBTree smaller, SMBTree larger, LtWitness w) {
  if (!observationally_equal(w.smaller(), smaller.raw()) || !observationally_equal(w.larger(), larger.raw())) {
    throw InvalidComposition("strict witness endpoints are not the raw trees");
  }
  return SmbLt(std::move(smaller), std::move(larger), std::move(w));
}

SmbLt SmbLt::unchecked(SMBTree smaller, SMBTree larger, LtWitness w) {
  return SmbLt(std::move(smaller), std::move(larger), std::move(w));
}

SmbLe smb_le_refl(const SMBTree& t) { return SmbLe::unchecked(t, t, le_refl(t.raw())); }

SmbLe smb_le_trans(const SmbLe& a, const SmbLe& b) {
  return SmbLe::unchecked(a.lhs(), b.rhs(), le_trans(a.get(), b.get()));
}

SmbLt smb_lt_then_le(const SmbLt& a, const SmbLe& b) {
  return SmbLt::unchecked(a.smaller(), b.rhs(), lt_then_le(a.get(), b.get()));
}

SmbLt smb_le_then_lt(const SmbLe& a, const SmbLt& b) {
  return SmbLt::unchecked(a.lhs(), b.larger(), le_then_lt(a.get(), b.get()));
}

SmbLe smb_lt_to_le(const SmbLt& w) { return SmbLe::unchecked(w.smaller(), w.larger(), lt_to_le(w.get())); }

SmbLe smb_le_upper_bound(const SMBTree& lim, const IndexElem& k) {
  SMBTree m = lim.member(k);
  const Tree& wrapped = lim.wrapped_limit();
  LeDeriv into_wrapped = LeDeriv::cocone(m.raw(), wrapped, IndexElem::just(k), le_refl(m.raw()));
  return SmbLe::unchecked(m, lim, trans_unchecked(into_wrapped, lim.iteration().self()));
}

SmbLe smb_le_least(const SMBTree& lim, const SMBTree& t, std::function<SmbLe(const IndexElem&)> per_k) {
  const Tree& wrapped = lim.wrapped_limit();
  const Tree& target = t.raw();
  LeDeriv below = LeDeriv::limiting(wrapped, target, [target, per_k](const IndexElem& e) {
    if (e.is_nothing()) return LeDeriv::zero(Tree(), target);
    return per_k(e.inner()).get();
  });
  InfJoin target_iteration(target, IndexCode::maybe(IndexCode::nat()));
  LeDeriv lifted = inf_mono(below, lim.iteration(), target_iteration);
  return SmbLe::unchecked(lim, t, trans_unchecked(lifted, target_iteration.collapse(t.witness())));
}

SmbLe smb_le_upper_bound(const IndexCode& c, Family f, const IndexElem& k) {
  return smb_le_upper_bound(smb_lim(c, std::move(f)), k);
}

SmbLe smb_le_least(const IndexCode& c, Family f, const SMBTree& t, std::function<SmbLe(const IndexElem&)> per_k) {
  return smb_le_least(smb_lim(c, std::move(f)), t, std::move(per_k));
}

// ---- maximum -----------------------------------------------------------------

SMBTree smb_max(const SMBTree& t1, const SMBTree& t2) {
  Tree raw = ind_max(t1.raw(), t2.raw());
  return make_smb(new_state(raw, [t1, t2, raw] {
    const Tree& r1 = t1.raw();
    const Tree& r2 = t2.raw();
    const LeDeriv& w1 = t1.witness();
    const LeDeriv& w2 = t2.witness();
    // (r1 v r2) v (r1 v r2) <= (r1 v r1) v (r2 v r2) <= r1 v r2
    Tree top = ind_max(raw, raw);
    Tree mid = ind_max(w1.lhs(), w2.lhs());
    LeDeriv swapped = detail::swap4(r1, r2, r1, r2, top, mid);
    return trans_unchecked(swapped, detail::mono(w1, w2, mid, raw));
  }));
}

namespace {

SmbLe bound_into(Side side, const SMBTree& t1, const SMBTree& t2, const SMBTree& m) {
  if (side == Side::Left) return SmbLe::unchecked(t1, m, detail::bound_left(t1.raw(), t2.raw(), m.raw()));
  return SmbLe::unchecked(t2, m, detail::bound_right(t1.raw(), t2.raw(), m.raw()));
}

SmbLe lub_from(const SMBTree& m, const SmbLe& d1, const SmbLe& d2) {
  const SMBTree& t = d1.rhs();
  if (t.id() != d2.rhs().id() && !observationally_equal(t.raw(), d2.rhs().raw())) {
    throw InvalidComposition("smb_max_lub: the two bounds have different upper ends");
  }
  const LeDeriv& w = t.witness();
  LeDeriv up = detail::mono(d1.get(), d2.get(), m.raw(), w.lhs());
  return SmbLe::unchecked(m, t, trans_unchecked(up, w));
}

}  // namespace

SmbLe smb_max_bound(Side side, const SMBTree& t1, const SMBTree& t2) {
  return bound_into(side, t1, t2, smb_max(t1, t2));
}

SmbLe smb_max_mono(const SmbLe& d1, const SmbLe& d2) {
  return smb_max_mono(d1, d2, smb_max(d1.lhs(), d2.lhs()), smb_max(d1.rhs(), d2.rhs()));
}

SmbLe smb_max_mono(const SmbLe& d1, const SmbLe& d2, const SMBTree& lhs_max, const SMBTree& rhs_max) {
  return SmbLe::unchecked(lhs_max, rhs_max, detail::mono(d1.get(), d2.get(), lhs_max.raw(), rhs_max.raw()));
}

SmbLe smb_max_bound(Side side, const SMBTree& t1, const SMBTree& t2, const SMBTree& max) {
  return bound_into(side, t1, t2, max);
}

SmbLe smb_max_lub(const SMBTree& lhs_max, const SmbLe& d1, const SmbLe& d2) { return lub_from(lhs_max, d1, d2); }

SmbLe smb_max_idem(const SMBTree& t) { return SmbLe::unchecked(smb_max(t, t), t, t.witness()); }

SmbLe smb_max_lub(const SmbLe& d1, const SmbLe& d2) { return lub_from(smb_max(d1.lhs(), d2.lhs()), d1, d2); }

SmbLt smb_max_strict_mono(const SmbLt& w1, const SmbLt& w2) {
  SMBTree l = smb_max(w1.smaller(), w2.smaller());
  SMBTree r = smb_max(w1.larger(), w2.larger());
  LeDeriv d = detail::mono(w1.get().deriv(), w2.get().deriv(), Tree::succ(l.raw()), r.raw());
  return SmbLt::unchecked(l, r, LtWitness(d));
}

SmbLt smb_max_suc_mono(const SmbLe& d1, const SmbLe& d2) {
  SMBTree l = smb_max(d1.lhs(), d2.lhs());
  SMBTree r = smb_max(smb_succ(d1.rhs()), smb_succ(d2.rhs()));
  LeDeriv inner = detail::mono(d1.get(), d2.get(), l.raw(), r.raw().pred());
  return SmbLt::unchecked(l, r, LtWitness(LeDeriv::suc_mono(Tree::succ(l.raw()), r.raw(), inner)));
}

SMBTree smb_lim_max(const SMBTree& t1, const SMBTree& t2) {
  return smb_nlim([t1, t2](Natural n) { return n == 0 ? t1 : t2; });
}

MaxEquiv max_equiv_limmax(const SMBTree& t1, const SMBTree& t2) {
  SMBTree m = smb_max(t1, t2);
  SMBTree lm = smb_lim_max(t1, t2);
  SmbLe fwd = lub_from(m, smb_le_upper_bound(lm, nat_iso().inv(0)), smb_le_upper_bound(lm, nat_iso().inv(1)));
  SmbLe bwd = smb_le_least(lm, m, [t1, t2, m](const IndexElem& k) {
    return bound_into(nat_iso().fun(k) == 0 ? Side::Left : Side::Right, t1, t2, m);
  });
  return MaxEquiv{fwd, bwd};
}

bool limits_are_wrapped(const Tree& t, ProbeLimits limits) {
  std::size_t visited = 0;
  std::vector<Tree> stack{t};
  while (!stack.empty() && visited < limits.max_nodes) {
    Tree cur = stack.back();
    stack.pop_back();
    ++visited;
    switch (cur.kind()) {
      case Tree::Kind::Zero:
        break;
      case Tree::Kind::Succ:
        stack.push_back(cur.pred());
        break;
      case Tree::Kind::Lim: {
        if (cur.code().kind() != IndexCode::Kind::Maybe) return false;
        Cardinality card = cardinality_hint(cur.code());
        Natural n = card.kind == Cardinality::Kind::Finite ? card.count : limits.probes_per_limit;
        if (card.kind == Cardinality::Kind::Empty) n = 0;
        for (Natural i = 0; i < std::min<Natural>(n, limits.probes_per_limit); ++i) {
          stack.push_back(cur.branch(element_at(cur.code(), i)));
        }
        break;
      }
    }
  }
  return true;
}

}  // namespace smb

#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "smb/join.hpp"

namespace smb {

/// When the idempotence witness of a freshly built SMB-tree is audited.
enum class WitnessPolicy {
  Lazy,   // on first call to SMBTree::is_idem()
  Eager,  // at construction
};

void set_witness_policy(WitnessPolicy p);
WitnessPolicy witness_policy();

/// Budget used for witness audits unless told otherwise.
AuditBudget standard_budget();

class SMBTree;
using Family = std::function<SMBTree(const IndexElem&)>;

/// A raw tree together with a derivation of ind_max(raw, raw) <= raw.
/// Only the smart constructors below and `checked` produce values.
class SMBTree {
 public:
  /// Audits `witness` (and its endpoints) before accepting the pair.
  static SMBTree checked(Tree raw, LeDeriv witness, const AuditBudget& budget = standard_budget());

  const Tree& raw() const;
  /// The idempotence witness, audited once at the standard budget before it
  /// is first handed out. Throws InvalidWitness if that audit fails.
  const LeDeriv& is_idem() const;
  /// The witness without triggering an audit.
  const LeDeriv& witness() const;
  /// Memoized audit of the witness at the standard budget.
  const AuditReport& witness_report() const;

  /// Set for trees built by smb_lim / smb_nlim.
  bool is_limit() const;
  const IndexCode& limit_code() const;
  /// Family member at k, memoized (same object every time).
  SMBTree member(const IndexElem& k) const;
  /// The Maybe-wrapped limit whose iterated self-join is raw.
  const Tree& wrapped_limit() const;
  const InfJoin& iteration() const;

  const void* id() const noexcept { return state_.get(); }

  struct State;

 private:
  explicit SMBTree(std::shared_ptr<State> s) : state_(std::move(s)) {}
  friend SMBTree make_smb(std::shared_ptr<State>);
  std::shared_ptr<State> state_;
};

SMBTree smb_zero();
SMBTree smb_succ(const SMBTree& t);
SMBTree smb_lim(const IndexCode& c, Family f);
SMBTree smb_nlim(std::function<SMBTree(Natural)> seq);
/// n-fold smb_succ of smb_zero.
SMBTree smb_from_nat(Natural n);
SMBTree smb_omega();

/// A derivation of lhs.raw <= rhs.raw.
class SmbLe {
 public:
  /// Throws InvalidComposition when the derivation's endpoints are not the raws.
  static SmbLe make(SMBTree lhs, SMBTree rhs, LeDeriv d);
  /// No endpoint check; for callers that built d from the raws themselves.
  static SmbLe unchecked(SMBTree lhs, SMBTree rhs, LeDeriv d);

  const SMBTree& lhs() const noexcept { return lhs_; }
  const SMBTree& rhs() const noexcept { return rhs_; }
  const LeDeriv& get() const noexcept { return d_; }

 private:
  SmbLe(SMBTree l, SMBTree r, LeDeriv d) : lhs_(std::move(l)), rhs_(std::move(r)), d_(std::move(d)) {}
  SMBTree lhs_;
  SMBTree rhs_;
  LeDeriv d_;
};

/// smaller < larger: a derivation of Succ(smaller.raw) <= larger.raw.
class SmbLt {
 public:
  static SmbLt make(SMBTree smaller, SMBTree larger, LtWitness w);
  static SmbLt unchecked(SMBTree smaller, SMBTree larger, LtWitness w);

  const SMBTree& smaller() const noexcept { return smaller_; }
  const SMBTree& larger() const noexcept { return larger_; }
  const LtWitness& get() const noexcept { return w_; }

 private:
  SmbLt(SMBTree s, SMBTree l, LtWitness w) : smaller_(std::move(s)), larger_(std::move(l)), w_(std::move(w)) {}
  SMBTree smaller_;
  SMBTree larger_;
  LtWitness w_;
};

SmbLe smb_le_refl(const SMBTree& t);
SmbLe smb_le_trans(const SmbLe& a, const SmbLe& b);
SmbLt smb_lt_then_le(const SmbLt& a, const SmbLe& b);
SmbLt smb_le_then_lt(const SmbLe& a, const SmbLt& b);
SmbLe smb_lt_to_le(const SmbLt& w);

/// member(k) <= lim. `lim` must come from smb_lim.
SmbLe smb_le_upper_bound(const SMBTree& lim, const IndexElem& k);
/// lim <= t from member(k) <= t for every k.
SmbLe smb_le_least(const SMBTree& lim, const SMBTree& t, std::function<SmbLe(const IndexElem&)> per_k);
/// Same, building the limit from (c, f) first.
SmbLe smb_le_upper_bound(const IndexCode& c, Family f, const IndexElem& k);
SmbLe smb_le_least(const IndexCode& c, Family f, const SMBTree& t, std::function<SmbLe(const IndexElem&)> per_k);

SMBTree smb_max(const SMBTree& t1, const SMBTree& t2);
SmbLe smb_max_bound(Side side, const SMBTree& t1, const SMBTree& t2);
SmbLe smb_max_mono(const SmbLe& d1, const SmbLe& d2);
/// max(t, t) <= t: the stored witness.
SmbLe smb_max_idem(const SMBTree& t);
SmbLe smb_max_lub(const SmbLe& d1, const SmbLe& d2);

// Variants taking an already built max(t1, t2) (or max of the lower ends),
// so that several lemmas about one join share its nodes.
SmbLe smb_max_bound(Side side, const SMBTree& t1, const SMBTree& t2, const SMBTree& max);
SmbLe smb_max_mono(const SmbLe& d1, const SmbLe& d2, const SMBTree& lhs_max, const SMBTree& rhs_max);
SmbLe smb_max_lub(const SMBTree& lhs_max, const SmbLe& d1, const SmbLe& d2);
SmbLt smb_max_strict_mono(const SmbLt& w1, const SmbLt& w2);
/// max(t1, t2) < max(succ t1', succ t2') from t1 <= t1' and t2 <= t2'.
SmbLt smb_max_suc_mono(const SmbLe& d1, const SmbLe& d2);

/// The limit over the naturals selecting t1 at 0 and t2 elsewhere.
SMBTree smb_lim_max(const SMBTree& t1, const SMBTree& t2);
struct MaxEquiv {
  SmbLe max_le_limmax;
  SmbLe limmax_le_max;
};
MaxEquiv max_equiv_limmax(const SMBTree& t1, const SMBTree& t2);

/// True when every limit met while probing `t` is over a Maybe code.
bool limits_are_wrapped(const Tree& t, ProbeLimits limits = {});

}  // namespace smb

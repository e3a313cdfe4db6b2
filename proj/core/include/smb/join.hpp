#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "smb/derivation.hpp"

namespace smb {

enum class Side { Left, Right };

// ---- limit-based maximum -----------------------------------------------------

/// Limit over the naturals selecting t1 at 0 and t2 everywhere else.
Tree lim_max(const Tree& t1, const Tree& t2);

/// t1 <= lim_max(t1, t2) (Left) or t2 <= lim_max(t1, t2) (Right).
LeDeriv lim_max_bound(Side side, const Tree& t1, const Tree& t2);
LeDeriv lim_max_mono(const LeDeriv& d1, const LeDeriv& d2);
/// lim_max(t1, t2) <= lim_max(t2, t1).
LeDeriv lim_max_commut(const Tree& t1, const Tree& t2);
/// lim_max(t, t) <= t.
LeDeriv lim_max_idem(const Tree& t);
/// lim_max(t1, t2) <= t from t1 <= t and t2 <= t.
LeDeriv lim_max_lub(const LeDeriv& d1, const LeDeriv& d2);

// ---- inductive maximum -------------------------------------------------------

enum class IndMaxView { ZL, ZR, LimL, LimR, SucSuc };

std::string to_string(IndMaxView v);

/// Case split used by ind_max, checked in the order ZL, ZR, LimL, LimR,
/// SucSuc.
IndMaxView ind_max_view(const Tree& t1, const Tree& t2);

/// Structural maximum. ind_max(Succ a, Succ b) is literally Succ(ind_max(a, b)).
/// Zero operands are absorbed by returning the other operand itself.
Tree ind_max(const Tree& t1, const Tree& t2);

/// t1 <= ind_max(t1, t2) (Left) or t2 <= ind_max(t1, t2) (Right). Limits met
/// on the way must be over inhabited codes (EmptyIndex otherwise).
LeDeriv ind_max_bound(Side side, const Tree& t1, const Tree& t2);

/// t <= lim from a derivation of t <= lim.branch(witness).
LeDeriv under_lim(const Tree& t, const Tree& lim, const IndexElem& witness, const LeDeriv::Branches& per_k);
/// Same, at the first element of the limit's code (EmptyIndex if none).
LeDeriv under_lim(const Tree& t, const Tree& lim, const LeDeriv::Branches& per_k);

/// ind_max(a, b) <= ind_max(a', b') from a <= a' and b <= b'.
LeDeriv ind_max_mono(const LeDeriv& d1, const LeDeriv& d2);
LeDeriv ind_max_mono_left(const LeDeriv& d, const Tree& t);
LeDeriv ind_max_mono_right(const Tree& t, const LeDeriv& d);
/// ind_max(a, b) < ind_max(a', b') from a < a' and b < b'.
LtWitness ind_max_strict_mono(const LtWitness& w1, const LtWitness& w2);

enum class AssocDir {
  Left,   // t1 v (t2 v t3) <= (t1 v t2) v t3
  Right,  // (t1 v t2) v t3 <= t1 v (t2 v t3)
};

LeDeriv ind_max_assoc(AssocDir dir, const Tree& t1, const Tree& t2, const Tree& t3);
/// t1 v t2 <= t2 v t1.
LeDeriv ind_max_commut(const Tree& t1, const Tree& t2);
/// (a v b) v (c v d) <= (a v c) v (b v d).
LeDeriv ind_max_swap4(const Tree& a, const Tree& b, const Tree& c, const Tree& d);

// ---- iterated self-join ------------------------------------------------------

/// Zero for n = 0, ind_max(n_ind_max(t, n - 1), t) otherwise.
Tree n_ind_max(const Tree& t, Natural n);

/// The limit over n of n_ind_max(t, n), together with the lemmas about it.
/// The finite iterates are built once and shared, so branches of the limit
/// are the same nodes the lemmas talk about.
class InfJoin {
 public:
  explicit InfJoin(Tree base, IndexCode nat_code = IndexCode::nat());

  const Tree& base() const;
  const Tree& tree() const;
  const IndexCode& code() const;
  /// n_ind_max(base, n), memoized.
  Tree iterate(Natural n) const;

  /// base <= tree
  LeDeriv self() const;
  /// ind_max(tree, base) <= tree
  LeDeriv idem1() const;
  /// ind_max(tree, iterate(n)) <= tree
  LeDeriv idem_n(Natural n) const;
  /// ind_max(tree, tree) <= tree
  LeDeriv idem() const;
  /// tree <= base from a proof that ind_max(base, base) <= base.
  LeDeriv collapse(const LeDeriv& d) const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

/// tree of InfJoin(t1) <= tree of InfJoin(t2) from t1 <= t2. The given
/// InfJoins fix the endpoints.
LeDeriv inf_mono(const LeDeriv& d, const InfJoin& from, const InfJoin& to);

Tree ind_max_inf(const Tree& t);
LeDeriv inf_self(const Tree& t);
LeDeriv inf_mono(const LeDeriv& d);
LeDeriv inf_idem1(const Tree& t);
LeDeriv inf_idem_n(const Tree& t, Natural n);
LeDeriv inf_idem(const Tree& t);
/// ind_max_inf(t) <= t from ind_max(t, t) <= t, with t = d.rhs.
LeDeriv inf_collapse(const LeDeriv& d);

namespace detail {

// Versions taking the endpoint trees explicitly. `lhs`/`rhs` must be the
// trees ind_max would build for the stated operands; passing the caller's
// own copies keeps endpoints pointer-identical across compositions.
LeDeriv bound_left(const Tree& t1, const Tree& t2, const Tree& rhs);
LeDeriv bound_right(const Tree& t1, const Tree& t2, const Tree& rhs);
LeDeriv mono(const LeDeriv& d1, const LeDeriv& d2, const Tree& lhs, const Tree& rhs);
LeDeriv commut(const Tree& t1, const Tree& t2, const Tree& lhs, const Tree& rhs);
/// lhs = t1 v (t2 v t3), rhs = (t1 v t2) v t3 for Left, swapped for Right.
LeDeriv assoc(AssocDir dir, const Tree& t1, const Tree& t2, const Tree& t3, const Tree& lhs, const Tree& rhs);
LeDeriv swap4(const Tree& a, const Tree& b, const Tree& c, const Tree& d, const Tree& lhs, const Tree& rhs);

}  // namespace detail

}  // namespace smb

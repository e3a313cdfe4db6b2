#include "smb/wf.hpp"

namespace smb {

AccNode AccNode::step(const Tree& y, const LtWitness& w) const {
  if (!observationally_equal(w.larger(), subject_)) {
    throw InvalidComposition("strict witness does not end at the accessible tree");
  }
  if (!observationally_equal(w.smaller(), y)) throw InvalidComposition("strict witness does not start at the argument");
  return step_(y, w);
}

AccNode ord_wf(const Tree& t) {
  switch (t.kind()) {
    case Tree::Kind::Zero:
      return AccNode(t, [](const Tree&, const LtWitness&) -> AccNode {
        throw MalformedWitness("nothing is strictly below zero");
      });
    case Tree::Kind::Succ:
      return AccNode(t, [t](const Tree&, const LtWitness& w) {
        const LeDeriv& d = w.deriv();
        if (d.rule() != Rule::SucMono) {
          throw MalformedWitness("witness below a successor must be SucMono, got " + to_string(d.rule()));
        }
        return smaller_accessible(ord_wf(t.pred()), d.sub());
      });
    case Tree::Kind::Lim:
      return AccNode(t, [t](const Tree& y, const LtWitness& w) {
        const LeDeriv& d = w.deriv();
        if (d.rule() != Rule::Cocone) {
          throw MalformedWitness("witness below a limit must be Cocone, got " + to_string(d.rule()));
        }
        return ord_wf(t.branch(d.witness())).step(y, LtWitness(d.sub()));
      });
  }
  throw MalformedWitness("unknown tree shape");
}

AccNode smaller_accessible(const AccNode& a, const LeDeriv& d) {
  if (!observationally_equal(d.rhs(), a.subject())) {
    throw InvalidComposition("derivation does not end at the accessible tree");
  }
  return AccNode(d.lhs(), [a, d](const Tree& z, const LtWitness& w) { return a.step(z, lt_then_le(w, d)); });
}

SmbAccNode smb_wf(const SMBTree& t) { return SmbAccNode(t, ord_wf(t.raw())); }

}  // namespace smb

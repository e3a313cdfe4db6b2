#pragma once

#include <cstddef>
#include <functional>

#include "smb/derivation.hpp"
#include "smb/errors.hpp"
#include "smb/smb_tree.hpp"

namespace smb {

/// Accessibility of a raw tree: every strictly smaller tree, given a witness,
/// is accessible. Children are built only when a step is taken.
class AccNode {
 public:
  using Step = std::function<AccNode(const Tree& y, const LtWitness& w)>;

  AccNode(Tree subject, Step step) : subject_(std::move(subject)), step_(std::move(step)) {}

  const Tree& subject() const noexcept { return subject_; }

  /// Node for y, given y < subject. Throws InvalidComposition if the
  /// witness does not end at the subject or does not start at y.
  AccNode step(const Tree& y, const LtWitness& w) const;

 private:
  Tree subject_;
  Step step_;
};

/// The structural accessibility proof: Zero has nothing below it, a successor
/// case needs a SucMono witness, a limit case a Cocone witness. Any other
/// witness shape raises MalformedWitness.
AccNode ord_wf(const Tree& t);

/// Node for y from a node for x and y <= x.
AccNode smaller_accessible(const AccNode& a, const LeDeriv& d);

/// Accessibility lifted to SMB-trees; steps unwrap the raw derivations.
class SmbAccNode {
 public:
  explicit SmbAccNode(SMBTree subject, AccNode raw) : subject_(std::move(subject)), raw_(std::move(raw)) {}

  const SMBTree& subject() const noexcept { return subject_; }
  const AccNode& raw() const noexcept { return raw_; }
  SmbAccNode step(const SmbLt& w) const { return SmbAccNode(w.smaller(), raw_.step(w.smaller().raw(), w.get())); }

 private:
  SMBTree subject_;
  AccNode raw_;
};

SmbAccNode smb_wf(const SMBTree& t);

struct WfOptions {
  bool audit_witnesses = false;
  AuditBudget budget = standard_budget();
  std::size_t watchdog = 1000000;
};

namespace detail {

inline void check_descent(const LeDeriv& d, const WfOptions& opts) {
  if (!opts.audit_witnesses) return;
  AuditReport r = audit(d, opts.budget);
  if (r.verdict == Verdict::Fail) throw DescentViolation(r.path, r.reason);
}

inline void tick(std::size_t& steps, const WfOptions& opts) {
  if (++steps > opts.watchdog) throw WatchdogTripped("recursion exceeded " + std::to_string(opts.watchdog) + " steps");
}

}  // namespace detail

template <class R>
using Recur = std::function<R(const Tree& y, const LtWitness& w)>;

template <class R>
using WfStep = std::function<R(const Tree& x, const Recur<R>& recur)>;

/// Well-founded recursion over the accessibility node of x0: recursive calls
/// must come with a witness that the argument is strictly smaller, and each
/// call descends one step in the node.
template <class R>
R wf_rec(const WfStep<R>& step, const Tree& x0, const AccNode& acc, const WfOptions& opts = {}) {
  std::size_t steps = 0;
  std::function<R(const Tree&, const AccNode&)> go = [&](const Tree& x, const AccNode& node) -> R {
    detail::tick(steps, opts);
    Recur<R> recur = [&](const Tree& y, const LtWitness& w) -> R {
      detail::check_descent(w.deriv(), opts);
      return go(y, node.step(y, w));
    };
    return step(x, recur);
  };
  return go(x0, acc);
}

template <class R>
R wf_rec(const WfStep<R>& step, const Tree& x0, const WfOptions& opts = {}) {
  return wf_rec<R>(step, x0, ord_wf(x0), opts);
}

/// Recursion on arbitrary inputs measured by an SMB-tree metric. Every
/// recursive call supplies metric(y) < metric(x); the witness is audited
/// before descending and a failed audit raises DescentViolation.
template <class In, class R>
R audited_fix(const std::function<SMBTree(const In&)>& metric,
              const std::function<R(const In&, const std::function<R(const In&, const SmbLt&)>&)>& step,
              const In& input0, WfOptions opts = WfOptions{true}) {
  std::size_t steps = 0;
  std::function<R(const In&, const SmbAccNode&)> go = [&](const In& x, const SmbAccNode& node) -> R {
    detail::tick(steps, opts);
    std::function<R(const In&, const SmbLt&)> recur = [&](const In& y, const SmbLt& w) -> R {
      if (!observationally_equal(w.larger().raw(), node.subject().raw())) {
        throw DescentViolation("root", "witness does not end at the current metric");
      }
      if (!observationally_equal(w.smaller().raw(), metric(y).raw())) {
        throw DescentViolation("root", "witness does not start at the metric of the recursive argument");
      }
      detail::check_descent(w.get().deriv(), opts);
      return go(y, node.step(w));
    };
    return step(x, recur);
  };
  SMBTree m0 = metric(input0);
  return go(input0, smb_wf(m0));
}

}  // namespace smb

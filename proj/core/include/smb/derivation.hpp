#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smb/tree.hpp"

namespace smb {

/// The four rules of the ordering on raw trees.
enum class Rule { Zero, SucMono, Cocone, Limiting };

std::string to_string(Rule r);

/// A derivation of lhs <= rhs. Every node carries its endpoints; the raw
/// constructors below do not check anything, so malformed derivations can
/// be built and are caught by `audit`. Limiting branches are produced on
/// demand and memoized.
class LeDeriv {
 public:
  using Branches = std::function<LeDeriv(const IndexElem&)>;

  static LeDeriv zero(Tree lhs, Tree rhs);
  static LeDeriv suc_mono(Tree lhs, Tree rhs, LeDeriv sub);
  /// Endpoints Succ(sub.lhs) and Succ(sub.rhs).
  static LeDeriv suc_mono(LeDeriv sub);
  static LeDeriv cocone(Tree lhs, Tree rhs, IndexElem k, LeDeriv sub);
  static LeDeriv limiting(Tree lhs, Tree rhs, Branches branches);
  /// As suc_mono / cocone, with the premise produced on first use.
  static LeDeriv suc_mono_deferred(Tree lhs, Tree rhs, std::function<LeDeriv()> sub);
  static LeDeriv cocone_deferred(Tree lhs, Tree rhs, IndexElem k, std::function<LeDeriv()> sub);

  Rule rule() const noexcept;
  const Tree& lhs() const noexcept;
  const Tree& rhs() const noexcept;
  const LeDeriv& sub() const;          // SucMono, Cocone
  const IndexElem& witness() const;    // Cocone
  LeDeriv branch(const IndexElem& k) const;  // Limiting; may throw

  /// Built by le_refl (endpoints are the same node).
  bool is_refl() const noexcept;
  const void* id() const noexcept { return node_.get(); }

 private:
  friend LeDeriv le_refl(const Tree& t);
  struct Node;
  explicit LeDeriv(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Witness of t1 < t2, i.e. a derivation of Succ(t1) <= t2.
class LtWitness {
 public:
  /// Throws InvalidComposition unless d.lhs is a successor.
  explicit LtWitness(LeDeriv d);

  const LeDeriv& deriv() const noexcept { return deriv_; }
  const Tree& smaller() const { return deriv_.lhs().pred(); }
  const Tree& larger() const noexcept { return deriv_.rhs(); }

 private:
  LeDeriv deriv_;
};

// ---- derived lemmas ------------------------------------------------------

LeDeriv le_refl(const Tree& t);
/// Reflexivity between two trees expected to be the same value (built
/// separately). Shape differences at the top throw InvalidComposition;
/// deeper differences surface as audit failures.
LeDeriv le_refl_eq(const Tree& lhs, const Tree& rhs);
/// Throws InvalidComposition when d12.rhs and d23.lhs differ observably or
/// the rule heads cannot meet.
LeDeriv le_trans(const LeDeriv& d12, const LeDeriv& d23);
/// Lim c f1 <= Lim c f2 from pointwise derivations.
LeDeriv ext_lim(const IndexCode& c, Tree::Branch f1, Tree::Branch f2, LeDeriv::Branches per_k);
LeDeriv ext_lim(const Tree& lim1, const Tree& lim2, LeDeriv::Branches per_k);
LeDeriv le_succ_self(const Tree& t);

enum class StrictKind { LtThenLe, LeThenLt };
LtWitness strict_compose(StrictKind kind, const LeDeriv& d1, const LeDeriv& d2);
LtWitness lt_then_le(const LtWitness& w, const LeDeriv& d);
LtWitness le_then_lt(const LeDeriv& d, const LtWitness& w);
LeDeriv lt_to_le(const LtWitness& w);

namespace detail {
/// Transitivity without the endpoint check on the middle tree.
LeDeriv trans_unchecked(const LeDeriv& d12, const LeDeriv& d23);
}  // namespace detail

// ---- auditing ------------------------------------------------------------

struct AuditBudget {
  std::size_t max_nodes = 100000;
  std::size_t samples_per_limiting = 16;
  std::uint64_t seed = 0xC0FFEE;
};

enum class Verdict { Pass, Fail, BudgetExhausted };
std::string to_string(Verdict v);

struct AuditReport {
  Verdict verdict = Verdict::Pass;
  std::string path;    // location of the violation (Fail) or of the cutoff
  std::string reason;
  std::size_t nodes_visited = 0;
  std::size_t samples_per_limiting = 0;
  std::uint64_t seed = 0;
  std::size_t limiting_nodes = 0;
  std::size_t branches_checked = 0;
  std::vector<IndexElem> root_samples;  // indices checked at the first limiting node

  bool passed() const noexcept { return verdict == Verdict::Pass; }
  std::string summary() const;
};

/// Indices of a limiting node that the auditor checks, at the given nesting
/// depth of limiting nodes. Finite codes of at most 64 elements are taken
/// whole near the root; other codes get a seeded sample that always
/// contains the first two positions and one large position.
std::vector<IndexElem> audit_indices(const IndexCode& c, std::size_t samples, std::size_t depth,
                                     std::uint64_t seed);

/// Spot-checks the local invariant of every reachable node, visiting
/// sampled branches of limiting nodes. Pass is evidence, not proof.
AuditReport audit(const LeDeriv& d, const AuditBudget& budget = {});

/// Audits a claimed proof of t < Zero. Such a derivation always violates a
/// local rule somewhere, so the report is a Fail locating it.
AuditReport not_lt_zero(const LtWitness& w, const AuditBudget& budget = {});

// ---- deciding and searching ------------------------------------------------

std::optional<bool> decide_le_finite(const Tree& t1, const Tree& t2);

struct SearchBudget {
  std::size_t max_nodes = 10000;
  std::size_t samples_per_limiting = 16;
  std::uint64_t seed = 0xC0FFEE;
};

/// Bounded proof search. Rules are tried in the order Zero, SucMono,
/// Limiting, Cocone (witnesses by enumeration). Goals between finitely
/// branching trees are decided by value first, so search is exact on them.
/// A returned derivation has passed an audit; nullopt means "unknown", not
/// "false".
std::optional<LeDeriv> search_le(const Tree& t1, const Tree& t2, const SearchBudget& budget = {});

}  // namespace smb

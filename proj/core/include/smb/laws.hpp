#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "smb/smb_tree.hpp"

namespace smb {

/// t1 ~ t2 as a pair of inequalities.
struct Equiv {
  SmbLe fwd;  // t1 <= t2
  SmbLe bwd;  // t2 <= t1

  const SMBTree& lhs() const { return fwd.lhs(); }
  const SMBTree& rhs() const { return fwd.rhs(); }
};

Equiv equiv_refl(const SMBTree& t);
Equiv equiv_symm(const Equiv& e);
Equiv equiv_trans(const Equiv& e1, const Equiv& e2);

/// t1 <= t2 gives max(t1, t2) ~ t2.
Equiv ord_to_equiv(const SmbLe& d);
/// Converse: from max(t1, t2) ~ t2 back to t1 <= t2. e.lhs() must be the
/// join of t1 and e.rhs().
SmbLe equiv_to_ord(const SMBTree& t1, const Equiv& e);

// ---- congruences -------------------------------------------------------------

/// t1' <= t2' from t1 ~ t1', t1 <= t2, t2 ~ t2'.
SmbLe le_resp(const Equiv& a, const SmbLe& d, const Equiv& b);
SmbLt lt_resp(const Equiv& a, const SmbLt& w, const Equiv& b);
Equiv succ_cong(const Equiv& e);
/// Pointwise equivalent families over the same code give equivalent limits.
Equiv lim_cong(const SMBTree& lim1, const SMBTree& lim2, const std::function<Equiv(const IndexElem&)>& per_k);
Equiv max_cong(const Equiv& e1, const Equiv& e2);

// ---- semilattice laws ------------------------------------------------------------

/// t1 v (t2 v t3) ~ (t1 v t2) v t3
Equiv join_assoc(const SMBTree& t1, const SMBTree& t2, const SMBTree& t3);
Equiv join_commut(const SMBTree& t1, const SMBTree& t2);
Equiv join_idem(const SMBTree& t);

/// t v succ t ~ succ t
Equiv succ_absorb(const SMBTree& t);
/// succ(t1 v t2) ~ succ t1 v succ t2
Equiv succ_dist(const SMBTree& t1, const SMBTree& t2);

// ---- limit laws ------------------------------------------------------------------
// Limits are SMB limits (is_limit()); members are read back through member().

/// f k v lim f ~ lim f
Equiv sup_bound(const SMBTree& lim, const IndexElem& k);
/// lim f v t ~ t, given f k v t ~ t for every k.
Equiv sup_supremum(const SMBTree& lim, const SMBTree& t, const std::function<Equiv(const IndexElem&)>& per_k);
/// The limit of a constant family over an inhabited code is the constant.
/// Throws EmptyIndex when no inhabitant is given.
Equiv sup_const(const IndexCode& c, const SMBTree& t, const std::optional<IndexElem>& inhabitant);
/// The limit over an empty code is zero. Throws NonEmptyIndex otherwise.
Equiv sup_empty(const IndexCode& c);
/// lim f v lim g ~ lim (k -> f k v g k); both limits over the same code.
Equiv dist_homo(const SMBTree& lim_f, const SMBTree& lim_g);
/// lim f v t ~ lim (k -> f k v t), over an inhabited code.
Equiv dist_het(const SMBTree& lim_f, const SMBTree& t, const std::optional<IndexElem>& inhabitant);

// ---- randomized law suite ----------------------------------------------------------

/// Stable law names, in suite order.
const std::vector<std::string>& law_names();

struct LawCase {
  std::string law;
  std::string operands;  // readable description of the sampled operands
  AuditReport fwd;
  AuditReport bwd;
  std::string error;  // set when building the equivalence threw

  bool passed() const { return error.empty() && fwd.passed() && bwd.passed(); }
};

/// A random operand and its description in expression syntax.
struct Operand {
  std::string text;
  SMBTree tree;
};

/// Mixed finite / omega-like operands, at most `depth` constructors deep.
Operand random_operand(std::mt19937_64& rng, int depth = 2);

/// Builds one random instance of the law and audits both directions.
/// Throws std::invalid_argument for an unknown law name.
LawCase run_law_case(const std::string& law, std::mt19937_64& rng, const AuditBudget& budget = standard_budget());

struct LawSummary {
  std::string law;
  std::size_t cases = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t exhausted = 0;
  double seconds = 0;
  std::vector<LawCase> failures;  // first few only
};

struct LawSuiteOptions {
  std::size_t trials = 300;
  std::uint64_t seed = 0xC0FFEE;
  AuditBudget budget = standard_budget();
  std::vector<std::string> laws;  // empty: all
};

/// Each law gets its own generator seeded from (seed, law name), so results
/// do not depend on which other laws run.
std::vector<LawSummary> run_law_suite(const LawSuiteOptions& opts);

}  // namespace smb

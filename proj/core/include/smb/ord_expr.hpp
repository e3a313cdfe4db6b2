#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smb/laws.hpp"

namespace smb {

/// Surface syntax for ordinals:
///   expr := "Z" | "S" expr | "max" "(" expr "," expr ")" | "lim" IDENT "." expr
///         | "omega" | NAT | IDENT
/// `lim` binds a natural-number variable; the body extends as far right as
/// possible.
class OrdExpr {
 public:
  enum class Kind { Zero, Succ, Max, Lim, Var, Nat, Omega };

  static OrdExpr zero();
  static OrdExpr succ(OrdExpr e);
  static OrdExpr max(OrdExpr a, OrdExpr b);
  static OrdExpr lim(std::string var, OrdExpr body);
  static OrdExpr var(std::string name);
  static OrdExpr nat(Natural n);
  static OrdExpr omega();

  Kind kind() const noexcept;
  const OrdExpr& arg() const;    // Succ
  const OrdExpr& left() const;   // Max
  const OrdExpr& right() const;  // Max
  const OrdExpr& body() const;   // Lim
  const std::string& name() const;  // Var, or the binder of Lim
  Natural value() const;         // Nat

  bool operator==(const OrdExpr& o) const;
  std::size_t size() const;

  struct Node;

 private:
  explicit OrdExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Throws ParseError with the offending offset and the tokens that would
/// have been accepted there.
OrdExpr parse_expr(std::string_view text);
std::string print_expr(const OrdExpr& e);

std::set<std::string> free_vars(const OrdExpr& e);
bool occurs_free(const OrdExpr& e, const std::string& var);

/// Throws UnboundVariable if e has a free variable. Under a binder, the
/// variable stands for the finite ordinal at the branch index; nested
/// binders may refer to outer ones.
SMBTree elaborate(const OrdExpr& e);

/// Numerals become successor chains; omega is kept.
OrdExpr desugar(const OrdExpr& e);
/// Successor chains over Z become numerals.
OrdExpr resugar(const OrdExpr& e);

// ---- simplifier ------------------------------------------------------------

enum class RewriteRule {
  ZeroLeft,        // max(Z, x) -> x
  ZeroRight,       // max(x, Z) -> x
  Idem,            // max(x, x) -> x
  IdemChain,       // max(x, max(x, y)) -> max(x, y)
  SuccDist,        // max(S a, S b) -> S max(a, b)
  SuccAbsorb,      // max(x, S x) -> S x
  SuccAbsorbLeft,  // max(S x, x) -> S x
  Assoc,           // max(max(a, b), c) -> max(a, max(b, c))
  Commut,          // max(a, b) -> max(b, a) when b sorts first
  LeftCommut,      // max(a, max(b, c)) -> max(b, max(a, c)) when b sorts first
  ConstLimit,      // lim n. e -> e when n is not free in e
};
std::string to_string(RewriteRule r);

/// Path from the root to the rewritten subterm: 'a' succ argument, 'l' / 'r'
/// max operands, 'b' lim body.
struct RewriteStep {
  RewriteRule rule;
  std::string path;
  OrdExpr before;  // whole expression, desugared
  OrdExpr after;
};

struct Simplification {
  OrdExpr input;
  OrdExpr result;  // resugared
  std::vector<RewriteStep> steps;
};

/// Rewrites the leftmost-outermost redex until none is left. Max operands
/// are brought into right-nested order by the printed form of their
/// resugared syntax.
Simplification simplify(const OrdExpr& e, std::size_t max_steps = 100000);

/// elaborate(step.before) ~ elaborate(step.after), built from the laws at
/// the redex and lifted through the enclosing constructors by congruence.
Equiv certify(const RewriteStep& step);

// ---- random expressions ------------------------------------------------------

struct ExprShape {
  int depth = 3;
  int max_lim_nesting = 2;
  Natural max_numeral = 6;
};

/// A closed random expression.
OrdExpr random_expr(std::mt19937_64& rng, const ExprShape& shape = {});

}  // namespace smb

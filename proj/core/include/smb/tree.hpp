#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "smb/index_universe.hpp"

namespace smb {

/// A raw Brouwer tree: zero, successor, or the limit of a family indexed by
/// some code. Trees are immutable and cheap to copy (shared ownership).
/// Limit branches are evaluated on demand and memoized per element, so a
/// branch yields the same node every time it is asked for.
class Tree {
 public:
  enum class Kind { Zero, Succ, Lim };
  using Branch = std::function<Tree(const IndexElem&)>;

  Tree();  // Zero

  static Tree zero() { return Tree(); }
  static Tree succ(Tree child);
  static Tree lim(IndexCode code, Branch branch);

  Kind kind() const noexcept;
  bool is_zero() const noexcept { return kind() == Kind::Zero; }
  bool is_succ() const noexcept { return kind() == Kind::Succ; }
  bool is_lim() const noexcept { return kind() == Kind::Lim; }

  /// Child of a successor.
  const Tree& pred() const;
  const IndexCode& code() const;
  /// Branch of a limit at k; k must belong to the limit's code.
  Tree branch(const IndexElem& k) const;

  /// Same node (not merely the same value).
  bool identical(const Tree& other) const noexcept { return node_ == other.node_; }
  const void* id() const noexcept { return node_.get(); }

 private:
  struct Node;
  static const std::shared_ptr<const Node>& zero_node();
  explicit Tree(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};


/// The n-fold successor of zero.
Tree from_nat(Natural n);

/// Limit over the naturals, through the given natural-number code. The
/// code must be countably infinite; its enumeration is the isomorphism.
Tree nlim(std::function<Tree(Natural)> seq, const IndexCode& nat_code = IndexCode::nat());

/// Value of a tree whose limits range over finite or empty codes only,
/// computed as Zero=0, Succ=+1, Lim=max over branches (0 if empty).
/// nullopt as soon as an infinite limit is met.
std::optional<Natural> finite_value(const Tree& t);

/// Limits on how hard observational comparison looks before concluding.
struct ProbeLimits {
  std::size_t max_nodes = 4096;
  std::size_t probes_per_limit = 3;
};

/// Structural comparison up to sampled limit branches. Identical nodes are
/// equal without looking further; a comparison that runs out of probe
/// budget without finding a difference counts as equal.
bool observationally_equal(const Tree& a, const Tree& b, ProbeLimits limits = {});

/// Short human-readable rendering, truncated at limits.
std::string describe(const Tree& t, int depth = 3);

}  // namespace smb

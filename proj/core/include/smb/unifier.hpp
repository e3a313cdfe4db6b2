#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "smb/laws.hpp"
#include "smb/wf.hpp"

namespace smb {

/// A labelled tree with finitely branching nodes and nat-branching `Fun`
/// nodes. Fun children are produced on demand and memoized.
class HTree {
 public:
  enum class Kind { Leaf, Node, Fun };
  using Gen = std::function<HTree(Natural)>;

  static HTree leaf(std::string label);
  static HTree node(std::string label, std::vector<HTree> children);
  /// `print_depth` only limits how many children are printed.
  static HTree fun(Gen children, Natural print_depth = 3);

  Kind kind() const noexcept;
  const std::string& label() const;  // Leaf, Node
  std::size_t arity() const;         // Node
  HTree child(Natural i) const;      // Node (i < arity), Fun
  Natural print_depth() const;       // Fun
  const void* id() const noexcept { return node_.get(); }

  struct Rep;
  const Rep& rep() const noexcept { return *node_; }

 private:
  explicit HTree(std::shared_ptr<const Rep> r) : node_(std::move(r)) {}
  std::shared_ptr<const Rep> node_;
};

/// Leaf: 1. Node: successor of the left fold of max over the children
/// (zero without children). Fun: successor of the limit of the children.
/// Memoized per node.
SMBTree size_of(const HTree& h);
/// The tree under the outer successor of size_of(h).
SMBTree size_core(const HTree& h);

/// size_of(child) < size_of(h) for a Node or Fun child.
SmbLt child_smaller(const HTree& h, Natural i);

/// (a v b) v (c v d) ~ (a v c) v (b v d)
Equiv join_interchange(const SMBTree& a, const SMBTree& b, const SMBTree& c, const SMBTree& d);

/// size(a_i) v size(b_i) < size(a) v size(b) for the i-th children of two
/// Nodes of equal arity or two Funs.
SmbLt pair_descent(const HTree& a, const HTree& b, Natural i);

class UnifyFailure : public Error {
 public:
  using Error::Error;
};

struct UnifyOptions {
  std::size_t fun_probes = 4;  // Fun children unified eagerly
  WfOptions wf = WfOptions{true};
};

struct UnifyStats {
  std::size_t calls = 0;
  std::size_t descents = 0;
};

/// Labels and arities must agree; children are unified pairwise. Runs
/// under audited_fix with metric max(size a, size b). Fun children past
/// `fun_probes` are unified when first read, by a fresh audited run; a
/// mismatch found then throws UnifyFailure.
std::optional<HTree> unify(const HTree& a, const HTree& b, const UnifyOptions& opts = {}, UnifyStats* stats = nullptr);

/// Structural equality; Fun children are compared at the first `fun_probes`
/// indices.
bool htree_equal(const HTree& a, const HTree& b, std::size_t fun_probes = 4);

/// Text format (see docs/htree-format.md):
///   htree := LABEL | LABEL "(" [htree {"," htree}] ")"
///          | "fun" VAR "." htree | "iter" COUNT LABEL htree
///   COUNT := NAT | VAR
HTree parse_htree(std::string_view text);
std::string print_htree(const HTree& h);

/// At most `depth` levels; when `allow_fun`, at most one Fun layer.
HTree random_htree(std::mt19937_64& rng, int depth, bool allow_fun);
/// Copy of h with each label replaced with probability `rate`.
HTree mutate_htree(const HTree& h, std::uint64_t seed, double rate);

}  // namespace smb

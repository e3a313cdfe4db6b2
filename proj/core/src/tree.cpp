#include "smb/tree.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace smb {

struct Tree::Node {
  Kind kind = Kind::Zero;
  Tree child;  // Succ only; default (Zero) otherwise
  std::optional<IndexCode> code;
  Branch branch;
  mutable std::mutex memo_mutex;
  mutable std::map<IndexElem, Tree> memo;

  // The zero node must not default-construct a child (that would recurse).
  Node() : child(std::shared_ptr<const Node>{}) {}
};

Tree::Tree() : node_(zero_node()) {}

Tree Tree::succ(Tree child) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Succ;
  n->child = std::move(child);
  return Tree(std::move(n));
}

Tree Tree::lim(IndexCode code, Branch branch) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Lim;
  n->code = std::move(code);
  n->branch = std::move(branch);
  return Tree(std::move(n));
}

const Tree& Tree::pred() const {
  if (!is_succ()) throw std::logic_error("pred of a non-successor tree");
  return node_->child;
}

const IndexCode& Tree::code() const {
  if (!is_lim()) throw std::logic_error("code of a non-limit tree");
  return *node_->code;
}

Tree Tree::branch(const IndexElem& k) const {
  if (!is_lim()) throw std::logic_error("branch of a non-limit tree");
  {
    std::lock_guard lock(node_->memo_mutex);
    if (auto it = node_->memo.find(k); it != node_->memo.end()) return it->second;
  }
  if (!belongs_to(k, *node_->code)) {
    throw std::invalid_argument("index " + k.to_string() + " outside code " + node_->code->to_string());
  }
  // Evaluated outside the lock: branches may recurse into other branches.
  Tree value = node_->branch(k);
  std::lock_guard lock(node_->memo_mutex);
  return node_->memo.try_emplace(k, std::move(value)).first->second;
}

const std::shared_ptr<const Tree::Node>& Tree::zero_node() {
  static const std::shared_ptr<const Node> node = std::make_shared<const Node>();
  return node;
}

Tree::Kind Tree::kind() const noexcept { return node_->kind; }

Tree from_nat(Natural n) {
  Tree t;
  for (Natural i = 0; i < n; ++i) t = Tree::succ(std::move(t));
  return t;
}

Tree nlim(std::function<Tree(Natural)> seq, const IndexCode& nat_code) {
  if (cardinality_hint(nat_code).kind != Cardinality::Kind::CountablyInfinite) {
    throw std::invalid_argument("nlim needs an infinite code, got " + nat_code.to_string());
  }
  return Tree::lim(nat_code, [seq = std::move(seq), nat_code](const IndexElem& e) {
    return seq(position_of(nat_code, e));
  });
}

std::optional<Natural> finite_value(const Tree& t) {
  switch (t.kind()) {
    case Tree::Kind::Zero:
      return 0;
    case Tree::Kind::Succ: {
      // Successor chains can be long; walk them iteratively.
      Natural depth = 0;
      const Tree* cur = &t;
      while (cur->is_succ()) {
        ++depth;
        cur = &cur->pred();
      }
      auto rest = finite_value(*cur);
      if (!rest) return std::nullopt;
      return *rest + depth;
    }
    case Tree::Kind::Lim: {
      Cardinality card = cardinality_hint(t.code());
      if (card.kind == Cardinality::Kind::CountablyInfinite) return std::nullopt;
      Natural best = 0;
      if (card.kind == Cardinality::Kind::Empty) return best;
      for (Natural i = 0; i < card.count; ++i) {
        auto v = finite_value(t.branch(element_at(t.code(), i)));
        if (!v) return std::nullopt;
        best = std::max(best, *v);
      }
      return best;
    }
  }
  return std::nullopt;
}

namespace {

struct Prober {
  ProbeLimits limits;
  std::size_t visited = 0;

  // false only when a concrete difference is found
  bool equal(const Tree& a0, const Tree& b0) {
    const Tree* a = &a0;
    const Tree* b = &b0;
    while (true) {
      if (a->identical(*b)) return true;
      if (++visited > limits.max_nodes) return true;
      if (a->kind() != b->kind()) return false;
      if (a->is_zero()) return true;
      if (a->is_succ()) {
        a = &a->pred();
        b = &b->pred();
        continue;
      }
      if (!(a->code() == b->code())) return false;
      Cardinality card = cardinality_hint(a->code());
      if (card.kind == Cardinality::Kind::Empty) return true;
      Natural probes = limits.probes_per_limit;
      if (card.kind == Cardinality::Kind::Finite) probes = std::min<Natural>(probes, card.count);
      for (Natural i = 0; i < probes; ++i) {
        IndexElem k = element_at(a->code(), i);
        if (!equal(a->branch(k), b->branch(k))) return false;
      }
      return true;
    }
  }
};

}  // namespace

bool observationally_equal(const Tree& a, const Tree& b, ProbeLimits limits) {
  Prober p{limits};
  return p.equal(a, b);
}

std::string describe(const Tree& t, int depth) {
  Natural succs = 0;
  const Tree* cur = &t;
  while (cur->is_succ()) {
    ++succs;
    cur = &cur->pred();
  }
  std::string inner;
  if (cur->is_zero()) {
    return std::to_string(succs);
  }
  if (depth <= 0) {
    inner = "lim[" + cur->code().to_string() + "](...)";
  } else {
    inner = "lim[" + cur->code().to_string() + "](";
    Cardinality card = cardinality_hint(cur->code());
    Natural shown = card.kind == Cardinality::Kind::Finite ? std::min<Natural>(card.count, 3) : 3;
    if (card.kind == Cardinality::Kind::Empty) shown = 0;
    for (Natural i = 0; i < shown; ++i) {
      if (i) inner += ", ";
      inner += describe(cur->branch(element_at(cur->code(), i)), depth - 1);
    }
    if (card.kind != Cardinality::Kind::Finite || card.count > shown) inner += ", ...";
    inner += ")";
  }
  if (succs == 0) return inner;
  return "S^" + std::to_string(succs) + " " + inner;
}

}  // namespace smb

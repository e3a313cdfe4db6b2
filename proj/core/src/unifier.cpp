#include "smb/unifier.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>

#include "smb/errors.hpp"

namespace smb {

namespace {

struct ChildMemo {
  HTree::Gen gen;
  std::mutex m;
  std::map<Natural, HTree> memo;

  HTree get(Natural n) {
    {
      std::lock_guard lock(m);
      if (auto it = memo.find(n); it != memo.end()) return it->second;
    }
    HTree h = gen(n);
    std::lock_guard lock(m);
    return memo.try_emplace(n, std::move(h)).first->second;
  }
};

}  // namespace

struct HTree::Rep {
  Kind kind = Kind::Leaf;
  std::string label;
  std::vector<HTree> kids;
  std::shared_ptr<ChildMemo> gen;
  Natural print_depth = 3;

  mutable std::once_flag size_once;
  mutable std::optional<SMBTree> core;
  mutable std::optional<SMBTree> size;
  mutable std::vector<SMBTree> folds;  // Node: max of the first i+1 child sizes
};

HTree HTree::leaf(std::string label) {
  auto r = std::make_shared<Rep>();
  r->label = std::move(label);
  return HTree(std::move(r));
}

HTree HTree::node(std::string label, std::vector<HTree> children) {
  auto r = std::make_shared<Rep>();
  r->kind = Kind::Node;
  r->label = std::move(label);
  r->kids = std::move(children);
  return HTree(std::move(r));
}

HTree HTree::fun(Gen children, Natural print_depth) {
  auto r = std::make_shared<Rep>();
  r->kind = Kind::Fun;
  r->gen = std::make_shared<ChildMemo>();
  r->gen->gen = std::move(children);
  r->print_depth = print_depth;
  return HTree(std::move(r));
}

HTree::Kind HTree::kind() const noexcept { return node_->kind; }

const std::string& HTree::label() const {
  if (kind() == Kind::Fun) throw std::logic_error("fun nodes carry no label");
  return node_->label;
}

std::size_t HTree::arity() const {
  if (kind() != Kind::Node) throw std::logic_error("arity of a non-node tree");
  return node_->kids.size();
}

HTree HTree::child(Natural i) const {
  if (kind() == Kind::Fun) return node_->gen->get(i);
  if (kind() != Kind::Node || i >= node_->kids.size()) throw std::out_of_range("no child " + std::to_string(i));
  return node_->kids[i];
}

Natural HTree::print_depth() const { return node_->print_depth; }

namespace {

void compute_size(const HTree::Rep& r) {
  switch (r.kind) {
    case HTree::Kind::Leaf:
      r.core = smb_zero();
      break;
    case HTree::Kind::Node:
      for (std::size_t i = 0; i < r.kids.size(); ++i) {
        SMBTree s = size_of(r.kids[i]);
        r.folds.push_back(i == 0 ? s : smb_max(r.folds.back(), s));
      }
      r.core = r.folds.empty() ? smb_zero() : r.folds.back();
      break;
    case HTree::Kind::Fun: {
      auto memo = r.gen;
      r.core = smb_nlim([memo](Natural n) { return size_of(memo->get(n)); });
      break;
    }
  }
  r.size = smb_succ(*r.core);
}

const HTree::Rep& sized(const HTree& h) {
  const HTree::Rep& r = h.rep();
  std::call_once(r.size_once, [&] { compute_size(r); });
  return r;
}

SmbLt below_succ(const SMBTree& t) {
  SMBTree s = smb_succ(t);
  return SmbLt::unchecked(t, s, LtWitness(le_refl(s.raw())));
}

std::vector<SMBTree> child_sizes(const HTree& h) {
  std::vector<SMBTree> out;
  for (std::size_t i = 0; i < h.arity(); ++i) out.push_back(size_of(h.child(i)));
  return out;
}

// size(child i) <= max of the first k+1 child sizes, for i <= k.
SmbLe into_fold(const HTree& h, std::size_t i, std::size_t k) {
  const auto& folds = sized(h).folds;
  auto sizes = child_sizes(h);
  SmbLe d = i == 0 ? smb_le_refl(folds[0]) : smb_max_bound(Side::Right, folds[i - 1], sizes[i], folds[i]);
  for (std::size_t j = i + 1; j <= k; ++j) d = smb_le_trans(d, smb_max_bound(Side::Left, folds[j - 1], sizes[j], folds[j]));
  return d;
}

// size(a_i) v size(b_i) <= fold_a[k] v fold_b[k], peeling one child pair per
// level with the interchange law.
SmbLe pair_into_folds(const HTree& a, const HTree& b, std::size_t i, std::size_t k) {
  const auto& fa = sized(a).folds;
  const auto& fb = sized(b).folds;
  if (k == 0) return smb_le_refl(smb_max(fa[0], fb[0]));
  SMBTree sa = size_of(a.child(k));
  SMBTree sb = size_of(b.child(k));
  Equiv x = join_interchange(fa[k - 1], sa, fb[k - 1], sb);
  SMBTree folds_below = smb_max(fa[k - 1], fb[k - 1]);
  SMBTree pair_k = smb_max(sa, sb);
  SmbLe into = i == k ? smb_max_bound(Side::Right, folds_below, pair_k)
                      : smb_le_trans(pair_into_folds(a, b, i, k - 1), smb_max_bound(Side::Left, folds_below, pair_k));
  return smb_le_trans(into, x.bwd);
}

}  // namespace

SMBTree size_core(const HTree& h) { return *sized(h).core; }

SMBTree size_of(const HTree& h) { return *sized(h).size; }

SmbLt child_smaller(const HTree& h, Natural i) {
  SMBTree core = size_core(h);
  SmbLe d = [&] {
    if (h.kind() == HTree::Kind::Fun) return smb_le_upper_bound(core, IndexElem::nat(i));
    if (h.kind() != HTree::Kind::Node || i >= h.arity()) throw std::out_of_range("no child " + std::to_string(i));
    return into_fold(h, i, h.arity() - 1);
  }();
  SmbLt w = smb_le_then_lt(d, below_succ(core));
  return SmbLt::unchecked(w.smaller(), size_of(h), w.get());
}

Equiv join_interchange(const SMBTree& a, const SMBTree& b, const SMBTree& c, const SMBTree& d) {
  SMBTree cd = smb_max(c, d);
  SMBTree bd = smb_max(b, d);
  Equiv inner = equiv_trans(equiv_trans(join_assoc(b, c, d), max_cong(join_commut(b, c), equiv_refl(d))),
                            equiv_symm(join_assoc(c, b, d)));
  return equiv_trans(equiv_trans(equiv_symm(join_assoc(a, b, cd)), max_cong(equiv_refl(a), inner)), join_assoc(a, c, bd));
}

SmbLt pair_descent(const HTree& a, const HTree& b, Natural i) {
  SmbLe le = [&] {
    if (a.kind() == HTree::Kind::Fun && b.kind() == HTree::Kind::Fun) {
      return smb_max_mono(smb_le_upper_bound(size_core(a), IndexElem::nat(i)),
                          smb_le_upper_bound(size_core(b), IndexElem::nat(i)));
    }
    if (a.kind() != HTree::Kind::Node || b.kind() != HTree::Kind::Node || a.arity() != b.arity() || i >= a.arity())
      throw std::invalid_argument("pair_descent needs two nodes of equal arity or two funs");
    return pair_into_folds(a, b, i, a.arity() - 1);
  }();
  SMBTree ca = size_core(a);
  SMBTree cb = size_core(b);
  SmbLt strict = smb_le_then_lt(le, below_succ(le.rhs()));
  // succ(ca v cb) ~ succ ca v succ cb, and the latter is the metric.
  return lt_resp(equiv_refl(strict.smaller()), strict, succ_dist(ca, cb));
}

// ---- unification ------------------------------------------------------------------

namespace {

using Pair = std::pair<HTree, HTree>;
using Result = std::optional<HTree>;
using Recurse = std::function<Result(const Pair&, const SmbLt&)>;

}  // namespace

std::optional<HTree> unify(const HTree& a0, const HTree& b0, const UnifyOptions& opts, UnifyStats* stats) {
  std::function<SMBTree(const Pair&)> metric = [](const Pair& p) { return smb_max(size_of(p.first), size_of(p.second)); };
  std::function<Result(const Pair&, const Recurse&)> step = [&](const Pair& x, const Recurse& recur) -> Result {
    if (stats) ++stats->calls;
    const HTree& a = x.first;
    const HTree& b = x.second;
    if (a.kind() != b.kind()) return std::nullopt;
    auto descend = [&](Natural i) {
      if (stats) ++stats->descents;
      return recur(Pair{a.child(i), b.child(i)}, pair_descent(a, b, i));
    };
    switch (a.kind()) {
      case HTree::Kind::Leaf:
        if (a.label() != b.label()) return std::nullopt;
        return a;
      case HTree::Kind::Node: {
        if (a.label() != b.label() || a.arity() != b.arity()) return std::nullopt;
        std::vector<HTree> kids;
        for (std::size_t i = 0; i < a.arity(); ++i) {
          Result r = descend(i);
          if (!r) return std::nullopt;
          kids.push_back(*r);
        }
        return HTree::node(a.label(), std::move(kids));
      }
      case HTree::Kind::Fun: {
        std::vector<HTree> probed;
        for (Natural n = 0; n < opts.fun_probes; ++n) {
          Result r = descend(n);
          if (!r) return std::nullopt;
          probed.push_back(*r);
        }
        UnifyOptions later = opts;
        return HTree::fun(
            [a, b, probed, later](Natural n) {
              if (n < probed.size()) return probed[n];
              Result r = unify(a.child(n), b.child(n), later);
              if (!r) throw UnifyFailure("fun children at index " + std::to_string(n) + " do not unify");
              return *r;
            },
            a.print_depth());
      }
    }
    return std::nullopt;
  };
  return audited_fix<Pair, Result>(metric, step, Pair{a0, b0}, opts.wf);
}

bool htree_equal(const HTree& a, const HTree& b, std::size_t fun_probes) {
  if (a.id() == b.id()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case HTree::Kind::Leaf:
      return a.label() == b.label();
    case HTree::Kind::Node:
      if (a.label() != b.label() || a.arity() != b.arity()) return false;
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (!htree_equal(a.child(i), b.child(i), fun_probes)) return false;
      return true;
    case HTree::Kind::Fun:
      for (Natural n = 0; n < fun_probes; ++n)
        if (!htree_equal(a.child(n), b.child(n), fun_probes)) return false;
      return true;
  }
  return false;
}

// ---- text format ----------------------------------------------------------------------

namespace {

struct HExpr {
  enum class Kind { Label, Node, Fun, Iter } kind = Kind::Label;
  std::string label;  // Label, Node, Iter
  std::vector<std::shared_ptr<const HExpr>> kids;
  std::string var;     // Fun binder; Iter count variable
  Natural count = 0;   // Iter, when var is empty
};

using HExprPtr = std::shared_ptr<const HExpr>;

class HParser {
 public:
  explicit HParser(std::string_view src) : src_(src) {}

  HExprPtr parse_all() {
    HExprPtr e = tree();
    skip_ws();
    if (at_ < src_.size()) fail("end of input");
    return e;
  }

 private:
  void skip_ws() {
    while (at_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[at_]))) ++at_;
  }

  [[noreturn]] void fail(const std::string& expected) {
    std::string found = at_ < src_.size() ? "'" + std::string(1, src_[at_]) + "'" : "end of input";
    throw ParseError(at_, expected, "unexpected " + found);
  }

  bool peek(char c) {
    skip_ws();
    return at_ < src_.size() && src_[at_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("'") + c + "'");
    ++at_;
  }

  std::string ident(const char* what) {
    skip_ws();
    std::size_t start = at_;
    if (at_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[at_])) || src_[at_] == '_')) {
      while (at_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[at_])) || src_[at_] == '_')) ++at_;
    }
    if (start == at_) fail(what);
    return std::string(src_.substr(start, at_ - start));
  }

  HExprPtr tree() {
    if (++depth_ > 1000) fail("a tree nested at most 1000 deep");
    skip_ws();
    std::string word = ident("a label, fun or iter");
    auto e = std::make_shared<HExpr>();
    if (word == "fun") {
      e->kind = HExpr::Kind::Fun;
      e->var = binder();
      expect('.');
      scope_.push_back(e->var);
      e->kids.push_back(tree());
      scope_.pop_back();
    } else if (word == "iter") {
      e->kind = HExpr::Kind::Iter;
      skip_ws();
      if (at_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[at_]))) {
        std::size_t s = at_;
        while (at_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[at_]))) ++at_;
        std::string digits(src_.substr(s, at_ - s));
        if (digits.size() > 6) {
          at_ = s;
          fail("a count below 1000000");
        }
        e->count = std::stoull(digits);
      } else {
        std::size_t s = at_;
        e->var = ident("a count (numeral or fun variable)");
        if (std::find(scope_.begin(), scope_.end(), e->var) == scope_.end()) {
          at_ = s;
          fail("a variable bound by an enclosing fun");
        }
      }
      e->label = label();
      e->kids.push_back(tree());
    } else {
      e->label = word;
      if (peek('(')) {
        ++at_;
        e->kind = HExpr::Kind::Node;
        if (!peek(')')) {
          e->kids.push_back(tree());
          while (peek(',')) {
            ++at_;
            e->kids.push_back(tree());
          }
        }
        expect(')');
      }
    }
    --depth_;
    return e;
  }

  std::string binder() {
    std::size_t s = (skip_ws(), at_);
    std::string v = ident("a variable name");
    if (v == "fun" || v == "iter") {
      at_ = s;
      fail("a variable name");
    }
    return v;
  }

  std::string label() {
    std::size_t s = (skip_ws(), at_);
    std::string l = ident("a label");
    if (l == "fun" || l == "iter") {
      at_ = s;
      fail("a label");
    }
    return l;
  }

  std::string_view src_;
  std::size_t at_ = 0;
  std::size_t depth_ = 0;
  std::vector<std::string> scope_;
};

using HEnv = std::vector<std::pair<std::string, Natural>>;

HTree build(const HExprPtr& e, const HEnv& env) {
  switch (e->kind) {
    case HExpr::Kind::Label:
      return HTree::leaf(e->label);
    case HExpr::Kind::Node: {
      std::vector<HTree> kids;
      for (const auto& k : e->kids) kids.push_back(build(k, env));
      return HTree::node(e->label, std::move(kids));
    }
    case HExpr::Kind::Fun:
      return HTree::fun([e, env](Natural n) {
        HEnv inner = env;
        inner.emplace_back(e->var, n);
        return build(e->kids[0], inner);
      });
    case HExpr::Kind::Iter: {
      Natural count = e->count;
      if (!e->var.empty()) {
        for (auto it = env.rbegin(); it != env.rend(); ++it)
          if (it->first == e->var) {
            count = it->second;
            break;
          }
      }
      HTree t = build(e->kids[0], env);
      for (Natural i = 0; i < count; ++i) t = HTree::node(e->label, {t});
      return t;
    }
  }
  throw std::logic_error("unknown tree expression");
}

void print_into(const HTree& h, std::string& out) {
  switch (h.kind()) {
    case HTree::Kind::Leaf:
      out += h.label();
      return;
    case HTree::Kind::Node:
      out += h.label() + "(";
      for (std::size_t i = 0; i < h.arity(); ++i) {
        if (i) out += ", ";
        print_into(h.child(i), out);
      }
      out += ")";
      return;
    case HTree::Kind::Fun:
      out += "fun{";
      for (Natural n = 0; n < h.print_depth(); ++n) {
        if (n) out += ", ";
        print_into(h.child(n), out);
      }
      out += h.print_depth() ? ", ...}" : "...}";
      return;
  }
}

const char* const kLabels[] = {"a", "b", "c"};

std::string other_label(const std::string& l, std::uint64_t r) {
  std::string pick = kLabels[r % 3];
  return pick == l ? std::string(kLabels[(r + 1) % 3]) : pick;
}

}  // namespace

HTree parse_htree(std::string_view text) { return build(HParser(text).parse_all(), {}); }

std::string print_htree(const HTree& h) {
  std::string out;
  print_into(h, out);
  return out;
}

HTree random_htree(std::mt19937_64& rng, int depth, bool allow_fun) {
  std::string label = kLabels[rng() % 3];
  if (depth <= 1) return HTree::leaf(label);
  std::uint64_t w = rng() % (allow_fun ? 10 : 8);
  if (w < 2) return HTree::leaf(label);
  if (w < 8) {
    std::vector<HTree> kids;
    std::size_t arity = rng() % 4;
    for (std::size_t i = 0; i < arity; ++i) kids.push_back(random_htree(rng, depth - 1, allow_fun));
    return HTree::node(label, std::move(kids));
  }
  std::uint64_t seed = rng();
  int below = depth - 1;
  if (w == 8) {
    // Chains whose depth follows the index, up to the depth bound.
    std::string f = kLabels[seed % 3];
    return HTree::fun([f, below](Natural n) {
      HTree t = HTree::leaf("a");
      for (Natural i = 0; i < n % static_cast<Natural>(below); ++i) t = HTree::node(f, {t});
      return t;
    });
  }
  return HTree::fun([seed, below](Natural n) {
    std::mt19937_64 r(mix_seed(seed ^ (n + 1)));
    return random_htree(r, below, false);
  });
}

HTree mutate_htree(const HTree& h, std::uint64_t seed, double rate) {
  std::mt19937_64 r(mix_seed(seed));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (h.kind()) {
    case HTree::Kind::Leaf:
      return u(r) < rate ? HTree::leaf(other_label(h.label(), r())) : h;
    case HTree::Kind::Node: {
      std::string label = u(r) < rate ? other_label(h.label(), r()) : h.label();
      std::vector<HTree> kids;
      for (std::size_t i = 0; i < h.arity(); ++i) kids.push_back(mutate_htree(h.child(i), mix_seed(seed + i + 1), rate));
      return HTree::node(label, std::move(kids));
    }
    case HTree::Kind::Fun:
      return HTree::fun([h, seed, rate](Natural n) { return mutate_htree(h.child(n), mix_seed(seed ^ (n + 0x51)), rate); },
                        h.print_depth());
  }
  return h;
}

}  // namespace smb

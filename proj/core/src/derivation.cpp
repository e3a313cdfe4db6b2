#include "smb/derivation.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "smb/errors.hpp"

namespace smb {

std::string to_string(Rule r) {
  switch (r) {
    case Rule::Zero:
      return "zero";
    case Rule::SucMono:
      return "sucMono";
    case Rule::Cocone:
      return "cocone";
    case Rule::Limiting:
      return "limiting";
  }
  return "?";
}

struct LeDeriv::Node {
  Rule rule = Rule::Zero;
  Tree lhs;
  Tree rhs;
  mutable std::optional<LeDeriv> sub;
  mutable std::function<LeDeriv()> deferred_sub;
  std::optional<IndexElem> k;
  Branches branches;
  bool refl = false;  // built by le_refl: lhs and rhs are the same node
  mutable std::mutex memo_mutex;
  mutable std::vector<std::pair<IndexElem, LeDeriv>> memo;  // few entries per node
};

LeDeriv LeDeriv::zero(Tree lhs, Tree rhs) {
  auto n = std::make_shared<Node>();
  n->rule = Rule::Zero;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return LeDeriv(std::move(n));
}

LeDeriv LeDeriv::suc_mono(Tree lhs, Tree rhs, LeDeriv sub) {
  auto n = std::make_shared<Node>();
  n->rule = Rule::SucMono;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->sub = std::move(sub);
  return LeDeriv(std::move(n));
}

LeDeriv LeDeriv::suc_mono(LeDeriv sub) {
  Tree l = Tree::succ(sub.lhs());
  Tree r = Tree::succ(sub.rhs());
  return suc_mono(std::move(l), std::move(r), std::move(sub));
}

LeDeriv LeDeriv::cocone(Tree lhs, Tree rhs, IndexElem k, LeDeriv sub) {
  auto n = std::make_shared<Node>();
  n->rule = Rule::Cocone;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->k = std::move(k);
  n->sub = std::move(sub);
  return LeDeriv(std::move(n));
}

LeDeriv LeDeriv::limiting(Tree lhs, Tree rhs, Branches branches) {
  auto n = std::make_shared<Node>();
  n->rule = Rule::Limiting;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->branches = std::move(branches);
  return LeDeriv(std::move(n));
}

Rule LeDeriv::rule() const noexcept { return node_->rule; }
bool LeDeriv::is_refl() const noexcept { return node_->refl; }
const Tree& LeDeriv::lhs() const noexcept { return node_->lhs; }
const Tree& LeDeriv::rhs() const noexcept { return node_->rhs; }

const LeDeriv& LeDeriv::sub() const {
  {
    std::lock_guard lock(node_->memo_mutex);
    if (node_->sub) return *node_->sub;
  }
  std::function<LeDeriv()> thunk;
  {
    std::lock_guard lock(node_->memo_mutex);
    thunk = node_->deferred_sub;
  }
  if (!thunk) throw std::logic_error("derivation rule " + to_string(rule()) + " has no sub-derivation");
  LeDeriv value = thunk();
  std::lock_guard lock(node_->memo_mutex);
  if (!node_->sub) {
    node_->sub = std::move(value);
    // The premise is fixed now; drop whatever the thunk was holding on to.
    node_->deferred_sub = nullptr;
  }
  return *node_->sub;
}

LeDeriv LeDeriv::suc_mono_deferred(Tree lhs, Tree rhs, std::function<LeDeriv()> sub) {
  auto n = std::make_shared<Node>();
  n->rule = Rule::SucMono;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->deferred_sub = std::move(sub);
  return LeDeriv(std::move(n));
}

LeDeriv LeDeriv::cocone_deferred(Tree lhs, Tree rhs, IndexElem k, std::function<LeDeriv()> sub) {
  auto n = std::make_shared<Node>();
  n->rule = Rule::Cocone;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->k = std::move(k);
  n->deferred_sub = std::move(sub);
  return LeDeriv(std::move(n));
}

const IndexElem& LeDeriv::witness() const {
  if (!node_->k) throw std::logic_error("only cocone derivations carry a witness");
  return *node_->k;
}

LeDeriv LeDeriv::branch(const IndexElem& k) const {
  if (rule() != Rule::Limiting) throw std::logic_error("branch of a non-limiting derivation");
  auto find = [&]() -> const LeDeriv* {
    for (const auto& [key, d] : node_->memo)
      if (key == k) return &d;
    return nullptr;
  };
  {
    std::lock_guard lock(node_->memo_mutex);
    if (const LeDeriv* d = find()) return *d;
  }
  LeDeriv value = node_->branches(k);
  std::lock_guard lock(node_->memo_mutex);
  if (const LeDeriv* d = find()) return *d;
  node_->memo.emplace_back(k, std::move(value));
  return node_->memo.back().second;
}

LtWitness::LtWitness(LeDeriv d) : deriv_(std::move(d)) {
  if (!deriv_.lhs().is_succ()) throw InvalidComposition("strict witness must have a successor on the left");
}

// ---- lemmas ------------------------------------------------------------------

LeDeriv le_refl(const Tree& t) {
  LeDeriv d = [&] {
  switch (t.kind()) {
    case Tree::Kind::Zero:
      return LeDeriv::zero(t, t);
    case Tree::Kind::Succ:
      return LeDeriv::suc_mono_deferred(t, t, [t] { return le_refl(t.pred()); });
    case Tree::Kind::Lim:
      return LeDeriv::limiting(t, t, [t](const IndexElem& k) {
        Tree fk = t.branch(k);
        return LeDeriv::cocone(fk, t, k, le_refl(fk));
      });
  }
  throw std::logic_error("unreachable");
  }();
  std::const_pointer_cast<LeDeriv::Node>(d.node_)->refl = true;
  return d;
}

LeDeriv le_refl_eq(const Tree& lhs, const Tree& rhs) {
  if (lhs.identical(rhs)) return le_refl(lhs);
  if (lhs.kind() != rhs.kind()) {
    throw InvalidComposition("reflexivity between trees of different shape");
  }
  switch (lhs.kind()) {
    case Tree::Kind::Zero:
      return LeDeriv::zero(lhs, rhs);
    case Tree::Kind::Succ:
      return LeDeriv::suc_mono_deferred(lhs, rhs, [lhs, rhs] { return le_refl_eq(lhs.pred(), rhs.pred()); });
    case Tree::Kind::Lim:
      if (!(lhs.code() == rhs.code())) throw InvalidComposition("reflexivity between limits over different codes");
      return LeDeriv::limiting(lhs, rhs, [lhs, rhs](const IndexElem& k) {
        return LeDeriv::cocone(lhs.branch(k), rhs, k, le_refl_eq(lhs.branch(k), rhs.branch(k)));
      });
  }
  throw std::logic_error("unreachable");
}

namespace detail {

LeDeriv trans_unchecked(const LeDeriv& d12, const LeDeriv& d23) {
  if (d12.is_refl() && d12.rhs().identical(d23.lhs())) return d23;
  if (d23.is_refl() && d23.lhs().identical(d12.rhs())) return d12;
  if (d12.rule() == Rule::Zero) return LeDeriv::zero(d12.lhs(), d23.rhs());
  if (d12.rule() == Rule::SucMono && d23.rule() == Rule::SucMono) {
    return LeDeriv::suc_mono_deferred(d12.lhs(), d23.rhs(), [d12, d23] { return trans_unchecked(d12.sub(), d23.sub()); });
  }
  if (d23.rule() == Rule::Cocone) {
    return LeDeriv::cocone_deferred(d12.lhs(), d23.rhs(), d23.witness(), [d12, d23] { return trans_unchecked(d12, d23.sub()); });
  }
  if (d12.rule() == Rule::Limiting) {
    return LeDeriv::limiting(d12.lhs(), d23.rhs(), [d12, d23](const IndexElem& k) {
      return trans_unchecked(d12.branch(k), d23);
    });
  }
  if (d12.rule() == Rule::Cocone && d23.rule() == Rule::Limiting) {
    return trans_unchecked(d12.sub(), d23.branch(d12.witness()));
  }
  throw InvalidComposition("cannot compose " + to_string(d12.rule()) + " with " + to_string(d23.rule()));
}

}  // namespace detail

LeDeriv le_trans(const LeDeriv& d12, const LeDeriv& d23) {
  if (!observationally_equal(d12.rhs(), d23.lhs())) {
    throw InvalidComposition("middle trees differ: " + describe(d12.rhs()) + " vs " + describe(d23.lhs()));
  }
  return detail::trans_unchecked(d12, d23);
}

LeDeriv ext_lim(const Tree& lim1, const Tree& lim2, LeDeriv::Branches per_k) {
  if (!lim1.is_lim() || !lim2.is_lim() || !(lim1.code() == lim2.code())) {
    throw InvalidComposition("ext_lim needs two limits over the same code");
  }
  return LeDeriv::limiting(lim1, lim2, [lim1, lim2, per_k = std::move(per_k)](const IndexElem& k) {
    return LeDeriv::cocone(lim1.branch(k), lim2, k, per_k(k));
  });
}

LeDeriv ext_lim(const IndexCode& c, Tree::Branch f1, Tree::Branch f2, LeDeriv::Branches per_k) {
  return ext_lim(Tree::lim(c, std::move(f1)), Tree::lim(c, std::move(f2)), std::move(per_k));
}

namespace {

LeDeriv succ_self_impl(const Tree& t, const Tree& succ_t) {
  switch (t.kind()) {
    case Tree::Kind::Zero:
      return LeDeriv::zero(t, succ_t);
    case Tree::Kind::Succ:
      // t = S x, so S x is t itself
      return LeDeriv::suc_mono_deferred(t, succ_t, [t] { return succ_self_impl(t.pred(), t); });
    case Tree::Kind::Lim:
      return LeDeriv::limiting(t, succ_t, [t, succ_t](const IndexElem& k) {
        Tree fk = t.branch(k);
        Tree succ_fk = Tree::succ(fk);
        LeDeriv up = succ_self_impl(fk, succ_fk);
        LeDeriv mono = LeDeriv::suc_mono(succ_fk, succ_t, LeDeriv::cocone(fk, t, k, le_refl(fk)));
        return detail::trans_unchecked(up, mono);
      });
  }
  throw std::logic_error("unreachable");
}

}  // namespace

LeDeriv le_succ_self(const Tree& t) { return succ_self_impl(t, Tree::succ(t)); }

LtWitness lt_then_le(const LtWitness& w, const LeDeriv& d) { return LtWitness(le_trans(w.deriv(), d)); }

LtWitness le_then_lt(const LeDeriv& d, const LtWitness& w) {
  if (!observationally_equal(d.rhs(), w.smaller())) {
    throw InvalidComposition("le_then_lt: endpoints do not chain");
  }
  LeDeriv lifted = LeDeriv::suc_mono(Tree::succ(d.lhs()), w.deriv().lhs(), d);
  return LtWitness(detail::trans_unchecked(lifted, w.deriv()));
}

LtWitness strict_compose(StrictKind kind, const LeDeriv& d1, const LeDeriv& d2) {
  if (kind == StrictKind::LtThenLe) return lt_then_le(LtWitness(d1), d2);
  return le_then_lt(d1, LtWitness(d2));
}

LeDeriv lt_to_le(const LtWitness& w) {
  const Tree& x = w.smaller();
  return detail::trans_unchecked(succ_self_impl(x, w.deriv().lhs()), w.deriv());
}

// ---- audit -------------------------------------------------------------------

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Fail:
      return "FAIL";
    case Verdict::BudgetExhausted:
      return "BUDGET_EXHAUSTED";
  }
  return "?";
}

std::string AuditReport::summary() const {
  std::ostringstream os;
  os << to_string(verdict) << " nodes=" << nodes_visited << " limiting=" << limiting_nodes
     << " branches=" << branches_checked << " samples=" << samples_per_limiting << " seed=0x" << std::hex
     << seed << std::dec;
  if (verdict != Verdict::Pass) os << " at " << path << ": " << reason;
  return os.str();
}

namespace {

std::size_t samples_at_depth(std::size_t samples, std::size_t depth) {
  if (depth == 0) return samples;
  std::size_t shift = 2 * depth;
  if (shift >= 63) return 1;
  return std::max<std::size_t>(1, samples >> shift);
}

}  // namespace

std::vector<IndexElem> audit_indices(const IndexCode& c, std::size_t samples, std::size_t depth,
                                     std::uint64_t seed) {
  Cardinality card = cardinality_hint(c);
  std::vector<IndexElem> out;
  if (card.kind == Cardinality::Kind::Empty || samples == 0) return out;
  if (card.kind == Cardinality::Kind::Finite && card.count <= 64 && depth <= 1) {
    for (Natural i = 0; i < card.count; ++i) out.push_back(element_at(c, i));
    return out;
  }
  std::size_t want = samples_at_depth(samples, depth);
  std::mt19937_64 rng(mix_seed(seed));
  std::vector<Natural> positions;
  auto add = [&](Natural p) {
    if (std::find(positions.begin(), positions.end(), p) == positions.end()) positions.push_back(p);
  };
  if (card.kind == Cardinality::Kind::Finite) {
    want = std::min<std::size_t>(want, card.count);
    std::vector<Natural> pool = {0, std::min<Natural>(1, card.count - 1), card.count - 1};
    if (want < pool.size()) {
      while (positions.size() < want) add(rng() % card.count);
    } else {
      for (Natural p : pool) add(p);
      while (positions.size() < want) add(rng() % card.count);
    }
  } else {
    // Deeper limiting nodes draw from a narrower index window ([0,6) + [6,9) at
    // the root, [0,3) + 3 below).
    Natural span = depth == 0 ? 6 : 3;
    Natural large = span + rng() % (span / 2);
    if (want < 3) {
      while (positions.size() < want) {
        Natural r = rng() % (span + 1);
        add(r == span ? large : r);
      }
    } else {
      add(0);
      add(1);
      add(large);
      while (positions.size() < want && positions.size() < span + 1) add(2 + rng() % (span - 2));
    }
  }
  for (Natural p : positions) out.push_back(element_at(c, p));
  return out;
}

namespace {

constexpr ProbeLimits kAuditProbe{512, 3};

struct Auditor {
  AuditBudget budget;
  AuditReport report;
  std::vector<std::string> path;
  bool stopped = false;

  std::string path_string() const {
    std::string s = "root";
    for (const auto& p : path) s += "/" + p;
    return s;
  }

  void fail(const std::string& reason) {
    report.verdict = Verdict::Fail;
    report.path = path_string();
    report.reason = reason;
    stopped = true;
  }

  static bool same(const Tree& a, const Tree& b) { return observationally_equal(a, b, kAuditProbe); }

  void visit(const LeDeriv& d, std::size_t lim_depth, std::uint64_t h) {
    if (stopped) return;
    if (++report.nodes_visited > budget.max_nodes) {
      report.verdict = Verdict::BudgetExhausted;
      report.path = path_string();
      report.reason = "node budget of " + std::to_string(budget.max_nodes) + " exhausted";
      stopped = true;
      return;
    }
    try {
      switch (d.rule()) {
        case Rule::Zero:
          if (!d.lhs().is_zero()) fail("zero rule with a non-zero left side");
          return;
        case Rule::SucMono: {
          if (!d.lhs().is_succ() || !d.rhs().is_succ()) {
            fail("sucMono rule between trees that are not both successors");
            return;
          }
          const LeDeriv& s = d.sub();
          if (!same(s.lhs(), d.lhs().pred()) || !same(s.rhs(), d.rhs().pred())) {
            fail("sucMono premise has the wrong endpoints");
            return;
          }
          path.push_back("suc");
          visit(s, lim_depth, mix_seed(h ^ 0x51));
          path.pop_back();
          return;
        }
        case Rule::Cocone: {
          if (!d.rhs().is_lim()) {
            fail("cocone rule with a non-limit right side");
            return;
          }
          const IndexElem& k = d.witness();
          if (!belongs_to(k, d.rhs().code())) {
            fail("cocone witness " + k.to_string() + " outside code " + d.rhs().code().to_string());
            return;
          }
          const LeDeriv& s = d.sub();
          if (!same(s.lhs(), d.lhs()) || !same(s.rhs(), d.rhs().branch(k))) {
            fail("cocone premise has the wrong endpoints");
            return;
          }
          path.push_back("cocone@" + k.to_string());
          visit(s, lim_depth, mix_seed(h ^ 0xC0));
          path.pop_back();
          return;
        }
        case Rule::Limiting: {
          if (!d.lhs().is_lim()) {
            fail("limiting rule with a non-limit left side");
            return;
          }
          ++report.limiting_nodes;
          auto ks = audit_indices(d.lhs().code(), budget.samples_per_limiting, lim_depth, h);
          if (report.limiting_nodes == 1) report.root_samples = ks;
          for (const auto& k : ks) {
            path.push_back("lim@" + k.to_string());
            ++report.branches_checked;
            LeDeriv b = d.branch(k);
            if (!same(b.lhs(), d.lhs().branch(k)) || !same(b.rhs(), d.rhs())) {
              fail("limiting branch has the wrong endpoints");
              return;
            }
            visit(b, lim_depth + 1, mix_seed(h + position_of(d.lhs().code(), k) + 1));
            path.pop_back();
            if (stopped) return;
          }
          return;
        }
      }
    } catch (const std::exception& e) {
      fail(std::string("evaluation failed: ") + e.what());
    }
  }
};

}  // namespace

AuditReport audit(const LeDeriv& d, const AuditBudget& budget) {
  Auditor a;
  a.budget = budget;
  a.report.samples_per_limiting = budget.samples_per_limiting;
  a.report.seed = budget.seed;
  a.visit(d, 0, mix_seed(budget.seed));
  return a.report;
}

AuditReport not_lt_zero(const LtWitness& w, const AuditBudget& budget) {
  if (!w.larger().is_zero()) throw InvalidComposition("not_lt_zero expects a witness against Zero");
  AuditReport r = audit(w.deriv(), budget);
  if (r.passed()) {
    // Unreachable for a Succ-over-Zero claim; kept so the result is never Pass.
    r.verdict = Verdict::Fail;
    r.path = "root";
    r.reason = "no tree is strictly below zero";
  }
  return r;
}

// ---- decide / search -------------------------------------------------------------

std::optional<bool> decide_le_finite(const Tree& t1, const Tree& t2) {
  auto a = finite_value(t1);
  if (!a) return std::nullopt;
  auto b = finite_value(t2);
  if (!b) return std::nullopt;
  return *a <= *b;
}

namespace {

// finite_value, giving up on trees of more than `budget` nodes.
std::optional<Natural> small_value(const Tree& t, std::size_t budget = 4096) {
  std::size_t seen = 0;
  std::function<std::optional<Natural>(const Tree&)> go = [&](const Tree& x) -> std::optional<Natural> {
    if (++seen > budget) return std::nullopt;
    switch (x.kind()) {
      case Tree::Kind::Zero: return Natural{0};
      case Tree::Kind::Succ: {
        auto v = go(x.pred());
        return v ? std::optional<Natural>(*v + 1) : std::nullopt;
      }
      case Tree::Kind::Lim: {
        Cardinality card = cardinality_hint(x.code());
        if (card.kind == Cardinality::Kind::CountablyInfinite) return std::nullopt;
        Natural best = 0;
        for (Natural i = 0; i < card.count; ++i) {
          auto v = go(x.branch(element_at(x.code(), i)));
          if (!v) return std::nullopt;
          best = std::max(best, *v);
        }
        return best;
      }
    }
    return std::nullopt;
  };
  return go(t);
}

class Searcher {
 public:
  Searcher(SearchBudget budget, std::size_t width) : budget_(budget), width_(width) {}

  bool exhausted() const { return exhausted_; }
  bool truncated() const { return truncated_; }
  std::size_t used() const { return used_; }

  std::optional<LeDeriv> go(const Tree& a, const Tree& b, std::size_t lim_depth, std::uint64_t h) {
    if (exhausted_) return std::nullopt;
    if (++used_ > budget_.max_nodes) {
      exhausted_ = true;
      return std::nullopt;
    }
    if (a.is_zero()) return LeDeriv::zero(a, b);
    if (a.is_succ() && b.is_succ()) {
      if (auto s = go(a.pred(), b.pred(), lim_depth, mix_seed(h ^ 0x51))) return LeDeriv::suc_mono(a, b, *s);
      return std::nullopt;
    }
    if (a.is_lim()) {
      // Exact on finitely branching trees, so the unsampled branches of a
      // Limiting node are true goals and the deferred search finds them.
      auto vb = small_value(b);
      auto va = vb ? small_value(a) : std::nullopt;
      if (va && *va > *vb) return std::nullopt;
      if (auto d = try_limiting(a, b, lim_depth, h)) return d;
    }
    if (b.is_lim()) {
      Cardinality card = cardinality_hint(b.code());
      std::vector<Natural> candidates;
      if (card.kind == Cardinality::Kind::Finite) {
        for (Natural i = 0; i < card.count; ++i) candidates.push_back(i);
      } else if (card.kind == Cardinality::Kind::CountablyInfinite) {
        truncated_ = true;
        for (Natural i = 0; i < width_; ++i) candidates.push_back(i);
        // A finite left side of value v usually sits below the branches
        // around position v; try those before widening further.
        if (auto v = finite_value(a)) {
          for (Natural p : {*v, *v + 1})
            if (p >= width_) candidates.push_back(p);
        }
      }
      for (Natural i : candidates) {
        if (exhausted_) break;
        IndexElem k = element_at(b.code(), i);
        if (auto s = go(a, b.branch(k), lim_depth, mix_seed(h ^ 0xC0))) return LeDeriv::cocone(a, b, k, *s);
      }
    }
    return std::nullopt;
  }

 private:
  std::optional<LeDeriv> try_limiting(const Tree& a, const Tree& b, std::size_t lim_depth, std::uint64_t h) {
    auto found = std::make_shared<std::map<IndexElem, LeDeriv>>();
    std::vector<IndexElem> probes = audit_indices(a.code(), budget_.samples_per_limiting, lim_depth, h);
    if (cardinality_hint(a.code()).kind == Cardinality::Kind::CountablyInfinite) {
      // Sampling alone would accept an unbounded family under a finite bound
      // whenever the samples stay small. Probe just past the bound as well.
      if (auto v = finite_value(b)) {
        for (Natural p : {*v + 1, 2 * *v + 2}) {
          IndexElem k = element_at(a.code(), p);
          if (std::find(probes.begin(), probes.end(), k) == probes.end()) probes.push_back(k);
        }
      }
    }
    for (const auto& k : probes) {
      auto s = go(a.branch(k), b, lim_depth + 1, mix_seed(h + position_of(a.code(), k) + 1));
      if (!s) return std::nullopt;
      found->emplace(k, *s);
    }
    SearchBudget lazy_budget = budget_;
    return LeDeriv::limiting(a, b, [a, b, found, lazy_budget](const IndexElem& k) {
      if (auto it = found->find(k); it != found->end()) return it->second;
      for (std::size_t width = 1; width <= lazy_budget.max_nodes; width *= 2) {
        Searcher s(lazy_budget, width);
        if (auto d = s.go(a.branch(k), b, 1, mix_seed(lazy_budget.seed ^ position_of(a.code(), k)))) return *d;
        if (s.exhausted() || !s.truncated()) break;
      }
      throw SearchFailure("no derivation found for limiting branch " + k.to_string());
    });
  }

  SearchBudget budget_;
  std::size_t width_;
  std::size_t used_ = 0;
  bool exhausted_ = false;
  bool truncated_ = false;
};

}  // namespace

std::optional<LeDeriv> search_le(const Tree& t1, const Tree& t2, const SearchBudget& budget) {
  std::size_t spent = 0;
  for (std::size_t width = 1; spent < budget.max_nodes; width *= 2) {
    SearchBudget round = budget;
    round.max_nodes = budget.max_nodes - spent;
    Searcher s(round, width);
    auto d = s.go(t1, t2, 0, mix_seed(budget.seed));
    if (d) {
      AuditBudget ab{std::max<std::size_t>(100000, budget.max_nodes), budget.samples_per_limiting, budget.seed};
      if (audit(*d, ab).passed()) return d;
      return std::nullopt;
    }
    if (s.exhausted() || !s.truncated()) return std::nullopt;
    spent += s.used();
  }
  return std::nullopt;
}

}  // namespace smb

#include "smb/certificate.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <vector>

#include "smb/errors.hpp"

namespace smb {

std::string to_string(Relation r) { return r == Relation::Le ? "le" : "lt"; }

std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::ProvedLe: return "PROVED_LE";
    case Comparison::ProvedLt: return "PROVED_LT";
    case Comparison::Unknown: return "UNKNOWN";
  }
  return "?";
}

std::pair<Tree, Tree> certificate_endpoints(Relation rel, const OrdExpr& a, const OrdExpr& b) {
  Tree lhs = elaborate(a).raw();
  if (rel == Relation::Lt) lhs = Tree::succ(lhs);
  return {lhs, elaborate(b).raw()};
}

namespace {

using NodePtr = std::shared_ptr<const CertNode>;
using Tag = CertNode::Tag;

NodePtr leaf(Tag t) {
  auto n = std::make_shared<CertNode>();
  n->tag = t;
  return n;
}

NodePtr with_sub(Tag t, NodePtr sub) {
  auto n = std::make_shared<CertNode>();
  n->tag = t;
  n->sub = std::move(sub);
  return n;
}

// ---- extraction -------------------------------------------------------------------

struct TooLarge {};

class Extractor {
 public:
  explicit Extractor(const ExtractOptions& o) : opts_(o) {}

  NodePtr go(const LeDeriv& d, int level) {
    if (++used_ > opts_.max_nodes) throw TooLarge{};
    if (d.is_refl() || d.lhs().identical(d.rhs())) return leaf(Tag::Refl);
    if (d.rule() != Rule::Zero && opts_.refl_by_probe && observationally_equal(d.lhs(), d.rhs(), {2048, 4}))
      return leaf(Tag::Refl);
    switch (d.rule()) {
      case Rule::Zero:
        return leaf(Tag::Zero);
      case Rule::SucMono:
        return with_sub(Tag::Succ, go(d.sub(), level));
      case Rule::Cocone: {
        auto n = std::make_shared<CertNode>();
        n->tag = Tag::Cocone;
        n->offset = position_of(d.rhs().code(), d.witness());
        n->sub = go(d.sub(), level);
        return n;
      }
      case Rule::Limiting:
        return limiting(d, level);
    }
    throw std::logic_error("unknown rule");
  }

 private:
  NodePtr search_node() const {
    auto n = std::make_shared<CertNode>();
    n->tag = Tag::Search;
    n->search_nodes = opts_.search_nodes;
    n->search_seed = opts_.search_seed;
    return n;
  }

  NodePtr limiting(const LeDeriv& d, int level) {
    auto n = std::make_shared<CertNode>();
    n->tag = Tag::Limiting;
    n->var = "k" + std::to_string(level + 1);
    const IndexCode& code = d.lhs().code();
    Cardinality card = cardinality_hint(code);
    if (card.kind == Cardinality::Kind::Empty) {
      n->sub = leaf(Tag::Zero);
      return n;
    }
    if (level >= opts_.schematic_depth) {
      n->sub = search_node();
      return n;
    }
    std::vector<Natural> positions{0, 1, 2, 3, 5};
    if (card.kind == Cardinality::Kind::Finite) {
      positions.clear();
      for (Natural i = 0; i < std::min<Natural>(card.count, 8); ++i) positions.push_back(i);
    }
    std::vector<NodePtr> bodies;
    for (Natural p : positions) {
      std::optional<LeDeriv> b;
      try {
        b = d.branch(element_at(code, p));
      } catch (const std::exception&) {
      }
      if (!b) {
        n->sub = search_node();
        return n;
      }
      bodies.push_back(go(*b, level + 1));
    }
    NodePtr merged = merge(bodies, n->var, positions);
    n->sub = merged ? merged : search_node();
    return n;
  }

  static NodePtr merge(const std::vector<NodePtr>& ts, const std::string& var, const std::vector<Natural>& ps) {
    const CertNode& first = *ts[0];
    for (const auto& t : ts)
      if (t->tag != first.tag) return nullptr;
    switch (first.tag) {
      case Tag::Zero:
      case Tag::Refl:
        return ts[0];
      case Tag::Search:
        return ts[0];
      case Tag::Succ:
      case Tag::Limiting: {
        std::vector<NodePtr> subs;
        for (const auto& t : ts) {
          if (t->var != first.var) return nullptr;
          subs.push_back(t->sub);
        }
        NodePtr s = merge(subs, var, ps);
        if (!s) return nullptr;
        auto n = std::make_shared<CertNode>(first);
        n->sub = std::move(s);
        return n;
      }
      case Tag::Cocone: {
        std::vector<NodePtr> subs;
        bool same = true;
        bool constant = true;
        for (const auto& t : ts) {
          subs.push_back(t->sub);
          same = same && t->var == first.var && t->offset == first.offset;
          constant = constant && t->var.empty();
        }
        auto n = std::make_shared<CertNode>(first);
        if (!same) {
          if (!constant || first.offset < ps[0]) return nullptr;
          Natural delta = first.offset - ps[0];
          for (std::size_t i = 0; i < ts.size(); ++i)
            if (ts[i]->offset < ps[i] || ts[i]->offset - ps[i] != delta) return nullptr;
          n->var = var;
          n->offset = delta;
        }
        NodePtr s = merge(subs, var, ps);
        if (!s) return nullptr;
        n->sub = std::move(s);
        return n;
      }
    }
    return nullptr;
  }

  ExtractOptions opts_;
  std::size_t used_ = 0;
};

// ---- text form ------------------------------------------------------------------------

void write_node(const CertNode& n0, std::size_t depth, std::string& out) {
  const CertNode* n = &n0;
  while (n) {
    out.append(std::min<std::size_t>(depth, 32) * 2, ' ');
    switch (n->tag) {
      case Tag::Zero: out += "Z"; break;
      case Tag::Refl: out += "R"; break;
      case Tag::Succ: out += "S"; break;
      case Tag::Cocone:
        out += "C ";
        if (n->var.empty()) {
          out += std::to_string(n->offset);
        } else {
          out += n->var;
          if (n->offset) out += "+" + std::to_string(n->offset);
        }
        break;
      case Tag::Limiting: out += "L " + n->var; break;
      case Tag::Search:
        out += "Q " + std::to_string(n->search_nodes) + " " + std::to_string(n->search_seed);
        break;
    }
    out += "\n";
    n = n->sub.get();
    ++depth;
  }
}

bool is_var_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> words;
  std::istringstream in{std::string(line)};
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

// ---- instantiation -----------------------------------------------------------------------

using Env = std::vector<std::pair<std::string, Natural>>;

Natural env_value(const Env& env, const std::string& var) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == var) return it->second;
  throw DeserializeError("unbound index variable '" + var + "'");
}

LeDeriv build(const NodePtr& n, const Tree& lhs, const Tree& rhs, const Env& env) {
  switch (n->tag) {
    case Tag::Zero:
      return LeDeriv::zero(lhs, rhs);
    case Tag::Refl:
      return le_refl_eq(lhs, rhs);
    case Tag::Succ: {
      NodePtr sub = n->sub;
      return LeDeriv::suc_mono_deferred(lhs, rhs, [sub, lhs, rhs, env] { return build(sub, lhs.pred(), rhs.pred(), env); });
    }
    case Tag::Cocone: {
      Natural pos = n->offset + (n->var.empty() ? 0 : env_value(env, n->var));
      IndexElem k = IndexElem::nat(pos);
      if (rhs.is_lim()) {
        Cardinality card = cardinality_hint(rhs.code());
        if (card.kind == Cardinality::Kind::CountablyInfinite || (card.kind == Cardinality::Kind::Finite && pos < card.count))
          k = element_at(rhs.code(), pos);
      }
      NodePtr sub = n->sub;
      return LeDeriv::cocone_deferred(lhs, rhs, k, [sub, lhs, rhs, k, env] { return build(sub, lhs, rhs.branch(k), env); });
    }
    case Tag::Limiting: {
      NodePtr sub = n->sub;
      std::string var = n->var;
      return LeDeriv::limiting(lhs, rhs, [sub, var, lhs, rhs, env](const IndexElem& k) {
        Env inner = env;
        inner.emplace_back(var, position_of(lhs.code(), k));
        return build(sub, lhs.branch(k), rhs, inner);
      });
    }
    case Tag::Search: {
      std::uint64_t seed = n->search_seed;
      for (const auto& [name, value] : env) seed = mix_seed(seed ^ (value + 0x9E3779B97F4A7C15ULL));
      // Later branches of a limit tend to need larger derivations than the
      // sampled ones the certificate was made from.
      for (std::size_t nodes = n->search_nodes, i = 0; i < 4; ++i, nodes *= 4)
        if (auto d = search_le(lhs, rhs, SearchBudget{nodes, 16, seed})) return *d;
      throw SearchFailure("bounded search found no derivation for a Q node");
    }
  }
  throw std::logic_error("unknown certificate tag");
}

}  // namespace

std::optional<Certificate> extract_certificate(const LeDeriv& d, Relation rel, const ExtractOptions& opts) {
  Extractor x(opts);
  try {
    return Certificate{rel, x.go(d, 0)};
  } catch (const TooLarge&) {
    return std::nullopt;
  }
}

std::string write_certificate(const Certificate& c, const std::string& comment) {
  std::string out = "smbderiv/1\nrel " + to_string(c.rel) + "\n";
  std::istringstream lines(comment);
  for (std::string l; std::getline(lines, l);) out += "# " + l + "\n";
  if (c.root) write_node(*c.root, 0, out);
  return out;
}

Certificate read_certificate(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
  {
    std::istringstream in{std::string(text)};
    std::size_t no = 0;
    for (std::string l; std::getline(in, l);) {
      ++no;
      auto words = split_words(l);
      if (words.empty() || words[0][0] == '#') continue;
      lines.emplace_back(no, std::move(words));
    }
  }
  auto fail = [](std::size_t line, const std::string& msg) -> DeserializeError {
    return DeserializeError("line " + std::to_string(line) + ": " + msg);
  };
  if (lines.empty() || lines[0].second != std::vector<std::string>{"smbderiv/1"})
    throw DeserializeError("missing smbderiv/1 header");
  if (lines.size() < 2 || lines[1].second.size() != 2 || lines[1].second[0] != "rel")
    throw fail(lines.size() < 2 ? 1 : lines[1].first, "expected 'rel le' or 'rel lt'");
  Certificate c;
  const std::string& rel = lines[1].second[1];
  if (rel == "le") c.rel = Relation::Le;
  else if (rel == "lt") c.rel = Relation::Lt;
  else throw fail(lines[1].first, "unknown relation '" + rel + "'");

  // Every tag has at most one premise, so the body is a chain of lines.
  std::vector<std::shared_ptr<CertNode>> chain;
  std::vector<std::string> scope;
  std::size_t i = 2;
  for (; i < lines.size(); ++i) {
    const auto& [no, w] = lines[i];
    auto n = std::make_shared<CertNode>();
    const std::string& tag = w[0];
    auto arity = [&, no = no, &w = w](std::size_t k) {
      if (w.size() != k + 1) throw fail(no, "tag " + tag + " takes " + std::to_string(k) + " argument(s)");
    };
    bool terminal = false;
    if (tag == "Z") {
      arity(0);
      n->tag = Tag::Zero;
      terminal = true;
    } else if (tag == "R") {
      arity(0);
      n->tag = Tag::Refl;
      terminal = true;
    } else if (tag == "S") {
      arity(0);
      n->tag = Tag::Succ;
    } else if (tag == "C") {
      arity(1);
      n->tag = Tag::Cocone;
      std::string_view a = w[1];
      auto plus = a.find('+');
      std::string_view head = a.substr(0, plus);
      if (plus != std::string_view::npos && !parse_number(a.substr(plus + 1), n->offset))
        throw fail(no, "bad offset in witness '" + w[1] + "'");
      if (is_var_name(head)) {
        n->var = std::string(head);
        if (std::find(scope.begin(), scope.end(), n->var) == scope.end())
          throw fail(no, "witness variable '" + n->var + "' is not bound by an enclosing L");
      } else if (plus != std::string_view::npos || !parse_number(head, n->offset)) {
        throw fail(no, "bad witness '" + w[1] + "'");
      }
    } else if (tag == "L") {
      arity(1);
      if (!is_var_name(w[1])) throw fail(no, "bad variable name '" + w[1] + "'");
      n->tag = Tag::Limiting;
      n->var = w[1];
      scope.push_back(w[1]);
    } else if (tag == "Q") {
      arity(2);
      n->tag = Tag::Search;
      if (!parse_number(w[1], n->search_nodes) || !parse_number(w[2], n->search_seed))
        throw fail(no, "Q takes a node budget and a seed");
      terminal = true;
    } else {
      throw fail(no, "unknown tag '" + tag + "'");
    }
    chain.push_back(n);
    if (terminal) break;
  }
  if (chain.empty()) throw DeserializeError("certificate has no derivation");
  if (i >= lines.size()) throw fail(lines.back().first, "derivation ends without Z, R or Q");
  if (i + 1 < lines.size()) throw fail(lines[i + 1].first, "trailing lines after the derivation");
  for (std::size_t j = chain.size() - 1; j > 0; --j) chain[j - 1]->sub = chain[j];
  c.root = chain[0];
  return c;
}

LeDeriv instantiate(const Certificate& c, const Tree& lhs, const Tree& rhs) {
  if (!c.root) throw DeserializeError("empty certificate");
  return build(c.root, lhs, rhs, {});
}

AuditReport cmd_check(std::string_view text, const OrdExpr& a, const OrdExpr& b, const AuditBudget& budget) {
  Certificate c = read_certificate(text);
  auto [lhs, rhs] = certificate_endpoints(c.rel, a, b);
  try {
    return audit(instantiate(c, lhs, rhs), budget);
  } catch (const DeserializeError&) {
    throw;
  } catch (const std::exception& e) {
    AuditReport r;
    r.verdict = Verdict::Fail;
    r.path = "root";
    r.reason = std::string("instantiation failed: ") + e.what();
    r.seed = budget.seed;
    r.samples_per_limiting = budget.samples_per_limiting;
    return r;
  }
}

CompareResult cmd_compare(const OrdExpr& a, const OrdExpr& b, const SearchBudget& budget) {
  CompareResult out;
  if (a == b) {
    out.outcome = Comparison::ProvedLe;
    out.certificate = write_certificate(Certificate{Relation::Le, leaf(Tag::Refl)}, print_expr(a) + " <= " + print_expr(b));
    out.note = "reflexivity";
    return out;
  }
  AuditBudget check_budget = standard_budget();
  check_budget.seed = budget.seed;
  bool found_any = false;
  for (Relation rel : {Relation::Lt, Relation::Le}) {
    auto [lhs, rhs] = certificate_endpoints(rel, a, b);
    auto d = search_le(lhs, rhs, budget);
    if (!d) continue;
    found_any = true;
    for (bool probe : {true, false}) {
      ExtractOptions xo;
      xo.refl_by_probe = probe;
      xo.search_nodes = budget.max_nodes;
      xo.search_seed = budget.seed;
      auto cert = extract_certificate(*d, rel, xo);
      if (!cert) continue;
      std::string comment = (rel == Relation::Lt ? "S " : "") + print_expr(a) + " <= " + print_expr(b);
      std::string text = write_certificate(*cert, comment);
      if (!cmd_check(text, a, b, check_budget).passed()) continue;
      out.outcome = rel == Relation::Lt ? Comparison::ProvedLt : Comparison::ProvedLe;
      out.certificate = std::move(text);
      return out;
    }
  }
  out.note = found_any ? "a derivation was found but no certificate for it re-checked; not a disproof"
                       : "search budget of " + std::to_string(budget.max_nodes) + " nodes exhausted; not a disproof";
  return out;
}

}  // namespace smb

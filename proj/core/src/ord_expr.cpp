#include "smb/ord_expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <stdexcept>

#include "smb/errors.hpp"

namespace smb {

struct OrdExpr::Node {
  Kind kind = Kind::Zero;
  std::vector<OrdExpr> kids;
  std::string name;
  Natural value = 0;
  std::size_t size = 1;
};

namespace {

constexpr Natural kMaxNumeral = Natural{1} << 20;

std::shared_ptr<OrdExpr::Node> make_node(OrdExpr::Kind k) {
  auto n = std::make_shared<OrdExpr::Node>();
  n->kind = k;
  return n;
}

}  // namespace

OrdExpr OrdExpr::zero() {
  static const OrdExpr z(make_node(Kind::Zero));
  return z;
}

OrdExpr OrdExpr::succ(OrdExpr e) {
  auto n = make_node(Kind::Succ);
  n->size = 1 + e.size();
  n->kids.push_back(std::move(e));
  return OrdExpr(std::move(n));
}

OrdExpr OrdExpr::max(OrdExpr a, OrdExpr b) {
  auto n = make_node(Kind::Max);
  n->size = 1 + a.size() + b.size();
  n->kids.push_back(std::move(a));
  n->kids.push_back(std::move(b));
  return OrdExpr(std::move(n));
}

OrdExpr OrdExpr::lim(std::string var, OrdExpr body) {
  auto n = make_node(Kind::Lim);
  n->size = 1 + body.size();
  n->name = std::move(var);
  n->kids.push_back(std::move(body));
  return OrdExpr(std::move(n));
}

OrdExpr OrdExpr::var(std::string name) {
  auto n = make_node(Kind::Var);
  n->name = std::move(name);
  return OrdExpr(std::move(n));
}

OrdExpr OrdExpr::nat(Natural v) {
  auto n = make_node(Kind::Nat);
  n->value = v;
  return OrdExpr(std::move(n));
}

OrdExpr OrdExpr::omega() {
  static const OrdExpr w(make_node(Kind::Omega));
  return w;
}

OrdExpr::Kind OrdExpr::kind() const noexcept { return node_->kind; }

const OrdExpr& OrdExpr::arg() const {
  if (kind() != Kind::Succ) throw std::logic_error("arg of a non-successor expression");
  return node_->kids[0];
}
const OrdExpr& OrdExpr::left() const {
  if (kind() != Kind::Max) throw std::logic_error("left of a non-max expression");
  return node_->kids[0];
}
const OrdExpr& OrdExpr::right() const {
  if (kind() != Kind::Max) throw std::logic_error("right of a non-max expression");
  return node_->kids[1];
}
const OrdExpr& OrdExpr::body() const {
  if (kind() != Kind::Lim) throw std::logic_error("body of a non-limit expression");
  return node_->kids[0];
}
const std::string& OrdExpr::name() const {
  if (kind() != Kind::Var && kind() != Kind::Lim) throw std::logic_error("name of an expression without one");
  return node_->name;
}
Natural OrdExpr::value() const {
  if (kind() != Kind::Nat) throw std::logic_error("value of a non-numeral expression");
  return node_->value;
}

std::size_t OrdExpr::size() const { return node_->size; }

bool OrdExpr::operator==(const OrdExpr& o) const {
  const OrdExpr* a = this;
  const OrdExpr* b = &o;
  while (true) {
    if (a->node_ == b->node_) return true;
    if (a->kind() != b->kind() || a->node_->size != b->node_->size) return false;
    switch (a->kind()) {
      case Kind::Zero:
      case Kind::Omega:
        return true;
      case Kind::Nat:
        return a->value() == b->value();
      case Kind::Var:
        return a->name() == b->name();
      case Kind::Lim:
        if (a->name() != b->name()) return false;
        a = &a->body();
        b = &b->body();
        continue;
      case Kind::Succ:
        a = &a->arg();
        b = &b->arg();
        continue;
      case Kind::Max:
        if (!(a->left() == b->left())) return false;
        a = &a->right();
        b = &b->right();
        continue;
    }
  }
}

// ---- parsing -------------------------------------------------------------------

namespace {

enum class Tok { Ident, Nat, LParen, RParen, Comma, Dot, End, Bad };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string text;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_keyword(const std::string& s) { return s == "Z" || s == "S" || s == "max" || s == "lim" || s == "omega"; }

const char* kExprStart = "Z, S, max, lim, omega, a numeral or a variable";

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  OrdExpr parse_all() {
    OrdExpr e = expr();
    if (cur_.kind != Tok::End) error("end of input");
    return e;
  }

 private:
  void advance() {
    std::size_t i = at_;
    while (i < src_.size() && std::isspace(static_cast<unsigned char>(src_[i]))) ++i;
    if (i >= src_.size()) {
      cur_ = {Tok::End, i, ""};
      at_ = i;
      return;
    }
    char c = src_[i];
    std::size_t start = i;
    if (ident_start(c)) {
      while (i < src_.size() && ident_char(src_[i])) ++i;
      cur_ = {Tok::Ident, start, std::string(src_.substr(start, i - start))};
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) ++i;
      cur_ = {Tok::Nat, start, std::string(src_.substr(start, i - start))};
    } else {
      ++i;
      Tok k = c == '(' ? Tok::LParen : c == ')' ? Tok::RParen : c == ',' ? Tok::Comma : c == '.' ? Tok::Dot : Tok::Bad;
      cur_ = {k, start, std::string(1, c)};
    }
    at_ = i;
  }

  [[noreturn]] void error(const std::string& expected) {
    std::string found = cur_.kind == Tok::End ? "end of input" : "'" + cur_.text + "'";
    throw ParseError(cur_.pos, expected, "unexpected " + found);
  }

  void expect(Tok k, const char* what) {
    if (cur_.kind != k) error(what);
    advance();
  }

  OrdExpr expr() {
    if (++depth_ > 2000) error("an expression nested at most 2000 deep");
    OrdExpr e = expr_inner();
    --depth_;
    return e;
  }

  OrdExpr expr_inner() {
    if (cur_.kind == Tok::Nat) {
      Natural v = 0;
      auto [p, ec] = std::from_chars(cur_.text.data(), cur_.text.data() + cur_.text.size(), v);
      if (ec != std::errc{} || v > kMaxNumeral) error("a numeral of at most " + std::to_string(kMaxNumeral));
      advance();
      return OrdExpr::nat(v);
    }
    if (cur_.kind != Tok::Ident) error(kExprStart);
    std::string word = cur_.text;
    advance();
    if (word == "Z") return OrdExpr::zero();
    if (word == "omega") return OrdExpr::omega();
    if (word == "S") {
      // Successor chains can be long; collect them without recursing.
      std::size_t count = 1;
      while (cur_.kind == Tok::Ident && cur_.text == "S") {
        ++count;
        advance();
      }
      OrdExpr e = expr();
      while (count--) e = OrdExpr::succ(std::move(e));
      return e;
    }
    if (word == "max") {
      expect(Tok::LParen, "'('");
      OrdExpr a = expr();
      expect(Tok::Comma, "','");
      OrdExpr b = expr();
      expect(Tok::RParen, "')'");
      return OrdExpr::max(std::move(a), std::move(b));
    }
    if (word == "lim") {
      if (cur_.kind != Tok::Ident || is_keyword(cur_.text)) error("a variable name");
      std::string var = cur_.text;
      advance();
      expect(Tok::Dot, "'.'");
      return OrdExpr::lim(std::move(var), expr());
    }
    return OrdExpr::var(std::move(word));
  }

  std::string_view src_;
  std::size_t at_ = 0;
  std::size_t depth_ = 0;
  Token cur_{Tok::End, 0, ""};
};

void print_into(const OrdExpr& e0, std::string& out) {
  const OrdExpr* e = &e0;
  while (e->kind() == OrdExpr::Kind::Succ) {
    out += "S ";
    e = &e->arg();
  }
  switch (e->kind()) {
    case OrdExpr::Kind::Zero:
      out += "Z";
      return;
    case OrdExpr::Kind::Omega:
      out += "omega";
      return;
    case OrdExpr::Kind::Nat:
      out += std::to_string(e->value());
      return;
    case OrdExpr::Kind::Var:
      out += e->name();
      return;
    case OrdExpr::Kind::Max:
      out += "max(";
      print_into(e->left(), out);
      out += ", ";
      print_into(e->right(), out);
      out += ")";
      return;
    case OrdExpr::Kind::Lim:
      out += "lim " + e->name() + ". ";
      print_into(e->body(), out);
      return;
    case OrdExpr::Kind::Succ:
      return;
  }
}

}  // namespace

OrdExpr parse_expr(std::string_view text) { return Parser(text).parse_all(); }

std::string print_expr(const OrdExpr& e) {
  std::string out;
  print_into(e, out);
  return out;
}

// ---- variables and elaboration -------------------------------------------------

namespace {

void collect_free(const OrdExpr& e, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (e.kind()) {
    case OrdExpr::Kind::Var:
      if (std::find(bound.begin(), bound.end(), e.name()) == bound.end()) out.insert(e.name());
      return;
    case OrdExpr::Kind::Succ:
      collect_free(e.arg(), bound, out);
      return;
    case OrdExpr::Kind::Max:
      collect_free(e.left(), bound, out);
      collect_free(e.right(), bound, out);
      return;
    case OrdExpr::Kind::Lim:
      bound.push_back(e.name());
      collect_free(e.body(), bound, out);
      bound.pop_back();
      return;
    default:
      return;
  }
}

using Env = std::vector<std::pair<std::string, Natural>>;

Natural lookup(const Env& env, const std::string& name) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == name) return it->second;
  throw UnboundVariable(name);
}

SMBTree elab(const OrdExpr& e, const Env& env) {
  switch (e.kind()) {
    case OrdExpr::Kind::Zero:
      return smb_zero();
    case OrdExpr::Kind::Omega:
      return smb_omega();
    case OrdExpr::Kind::Nat:
      return smb_from_nat(e.value());
    case OrdExpr::Kind::Var:
      return smb_from_nat(lookup(env, e.name()));
    case OrdExpr::Kind::Succ: {
      std::size_t count = 0;
      const OrdExpr* cur = &e;
      while (cur->kind() == OrdExpr::Kind::Succ) {
        ++count;
        cur = &cur->arg();
      }
      SMBTree t = elab(*cur, env);
      while (count--) t = smb_succ(t);
      return t;
    }
    case OrdExpr::Kind::Max:
      return smb_max(elab(e.left(), env), elab(e.right(), env));
    case OrdExpr::Kind::Lim:
      return smb_nlim([e, env](Natural k) {
        Env inner = env;
        inner.emplace_back(e.name(), k);
        return elab(e.body(), inner);
      });
  }
  throw std::logic_error("unknown expression kind");
}

}  // namespace

std::set<std::string> free_vars(const OrdExpr& e) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  collect_free(e, bound, out);
  return out;
}

bool occurs_free(const OrdExpr& e, const std::string& var) { return free_vars(e).count(var) > 0; }

SMBTree elaborate(const OrdExpr& e) {
  auto fv = free_vars(e);
  if (!fv.empty()) throw UnboundVariable(*fv.begin());
  return elab(e, {});
}

OrdExpr desugar(const OrdExpr& e) {
  switch (e.kind()) {
    case OrdExpr::Kind::Nat: {
      OrdExpr out = OrdExpr::zero();
      for (Natural i = 0; i < e.value(); ++i) out = OrdExpr::succ(std::move(out));
      return out;
    }
    case OrdExpr::Kind::Succ: {
      std::size_t count = 0;
      const OrdExpr* cur = &e;
      while (cur->kind() == OrdExpr::Kind::Succ) {
        ++count;
        cur = &cur->arg();
      }
      OrdExpr out = desugar(*cur);
      while (count--) out = OrdExpr::succ(std::move(out));
      return out;
    }
    case OrdExpr::Kind::Max:
      return OrdExpr::max(desugar(e.left()), desugar(e.right()));
    case OrdExpr::Kind::Lim:
      return OrdExpr::lim(e.name(), desugar(e.body()));
    default:
      return e;
  }
}

OrdExpr resugar(const OrdExpr& e) {
  switch (e.kind()) {
    case OrdExpr::Kind::Succ: {
      std::size_t count = 0;
      const OrdExpr* cur = &e;
      while (cur->kind() == OrdExpr::Kind::Succ) {
        ++count;
        cur = &cur->arg();
      }
      if (cur->kind() == OrdExpr::Kind::Zero) return OrdExpr::nat(count);
      if (cur->kind() == OrdExpr::Kind::Nat) return OrdExpr::nat(count + cur->value());
      OrdExpr out = resugar(*cur);
      while (count--) out = OrdExpr::succ(std::move(out));
      return out;
    }
    case OrdExpr::Kind::Max:
      return OrdExpr::max(resugar(e.left()), resugar(e.right()));
    case OrdExpr::Kind::Lim:
      return OrdExpr::lim(e.name(), resugar(e.body()));
    default:
      return e;
  }
}

// ---- simplifier ------------------------------------------------------------------

std::string to_string(RewriteRule r) {
  switch (r) {
    case RewriteRule::ZeroLeft: return "zero-left";
    case RewriteRule::ZeroRight: return "zero-right";
    case RewriteRule::Idem: return "idem";
    case RewriteRule::IdemChain: return "idem-chain";
    case RewriteRule::SuccDist: return "succ-dist";
    case RewriteRule::SuccAbsorb: return "succ-absorb";
    case RewriteRule::SuccAbsorbLeft: return "succ-absorb-left";
    case RewriteRule::Assoc: return "assoc";
    case RewriteRule::Commut: return "commut";
    case RewriteRule::LeftCommut: return "left-commut";
    case RewriteRule::ConstLimit: return "const-limit";
  }
  return "?";
}

namespace {

using K = OrdExpr::Kind;

std::string sort_key(const OrdExpr& e) { return print_expr(resugar(e)); }

bool before_in_order(const OrdExpr& a, const OrdExpr& b) { return sort_key(a) < sort_key(b); }

std::optional<std::pair<OrdExpr, RewriteRule>> contract(const OrdExpr& e) {
  if (e.kind() == K::Lim) {
    if (!occurs_free(e.body(), e.name())) return std::pair{e.body(), RewriteRule::ConstLimit};
    return std::nullopt;
  }
  if (e.kind() != K::Max) return std::nullopt;
  const OrdExpr& a = e.left();
  const OrdExpr& b = e.right();
  if (b.kind() == K::Zero) return std::pair{a, RewriteRule::ZeroRight};
  if (a.kind() == K::Zero) return std::pair{b, RewriteRule::ZeroLeft};
  if (a == b) return std::pair{a, RewriteRule::Idem};
  if (b.kind() == K::Max && b.left() == a) return std::pair{b, RewriteRule::IdemChain};
  if (a.kind() == K::Succ && b.kind() == K::Succ)
    return std::pair{OrdExpr::succ(OrdExpr::max(a.arg(), b.arg())), RewriteRule::SuccDist};
  if (b.kind() == K::Succ && b.arg() == a) return std::pair{b, RewriteRule::SuccAbsorb};
  if (a.kind() == K::Succ && a.arg() == b) return std::pair{a, RewriteRule::SuccAbsorbLeft};
  if (a.kind() == K::Max)
    return std::pair{OrdExpr::max(a.left(), OrdExpr::max(a.right(), b)), RewriteRule::Assoc};
  if (b.kind() != K::Max) {
    if (before_in_order(b, a)) return std::pair{OrdExpr::max(b, a), RewriteRule::Commut};
    return std::nullopt;
  }
  if (before_in_order(b.left(), a))
    return std::pair{OrdExpr::max(b.left(), OrdExpr::max(a, b.right())), RewriteRule::LeftCommut};
  return std::nullopt;
}

struct Found {
  OrdExpr replaced;
  RewriteRule rule;
  std::string path;
};

std::optional<Found> find_redex(const OrdExpr& e, std::string& path) {
  if (auto c = contract(e)) return Found{c->first, c->second, path};
  auto descend = [&](const OrdExpr& child, char dir, auto rebuild) -> std::optional<Found> {
    path.push_back(dir);
    auto f = find_redex(child, path);
    path.pop_back();
    if (f) f->replaced = rebuild(f->replaced);
    return f;
  };
  switch (e.kind()) {
    case K::Succ:
      return descend(e.arg(), 'a', [](OrdExpr x) { return OrdExpr::succ(std::move(x)); });
    case K::Max:
      if (auto f = descend(e.left(), 'l', [&](OrdExpr x) { return OrdExpr::max(std::move(x), e.right()); })) return f;
      return descend(e.right(), 'r', [&](OrdExpr x) { return OrdExpr::max(e.left(), std::move(x)); });
    case K::Lim:
      return descend(e.body(), 'b', [&](OrdExpr x) { return OrdExpr::lim(e.name(), std::move(x)); });
    default:
      return std::nullopt;
  }
}

}  // namespace

Simplification simplify(const OrdExpr& e, std::size_t max_steps) {
  Simplification out{e, e, {}};
  OrdExpr cur = desugar(e);
  for (std::size_t i = 0; i < max_steps; ++i) {
    std::string path;
    auto f = find_redex(cur, path);
    if (!f) break;
    out.steps.push_back(RewriteStep{f->rule, f->path, cur, f->replaced});
    cur = f->replaced;
  }
  out.result = resugar(cur);
  return out;
}

namespace {

Equiv trans3(const Equiv& a, const Equiv& b, const Equiv& c) { return equiv_trans(equiv_trans(a, b), c); }

Equiv zero_absorb(const SMBTree& t) {
  SMBTree z = smb_zero();
  return ord_to_equiv(SmbLe::make(z, t, LeDeriv::zero(z.raw(), t.raw())));
}

Equiv rule_certificate(RewriteRule rule, const OrdExpr& e, const Env& env) {
  auto el = [&](const OrdExpr& x) { return elab(x, env); };
  switch (rule) {
    case RewriteRule::ConstLimit:
      return sup_const(IndexCode::nat(), el(e.body()), IndexElem::nat(0));
    case RewriteRule::ZeroLeft:
      return zero_absorb(el(e.right()));
    case RewriteRule::ZeroRight: {
      SMBTree a = el(e.left());
      return equiv_trans(join_commut(a, smb_zero()), zero_absorb(a));
    }
    case RewriteRule::Idem:
      return join_idem(el(e.left()));
    case RewriteRule::IdemChain: {
      SMBTree a = el(e.left());
      SMBTree c = el(e.right().right());
      return equiv_trans(join_assoc(a, a, c), max_cong(join_idem(a), equiv_refl(c)));
    }
    case RewriteRule::SuccDist:
      return equiv_symm(succ_dist(el(e.left().arg()), el(e.right().arg())));
    case RewriteRule::SuccAbsorb:
      return succ_absorb(el(e.left()));
    case RewriteRule::SuccAbsorbLeft: {
      SMBTree b = el(e.right());
      return equiv_trans(join_commut(smb_succ(b), b), succ_absorb(b));
    }
    case RewriteRule::Assoc:
      return equiv_symm(join_assoc(el(e.left().left()), el(e.left().right()), el(e.right())));
    case RewriteRule::Commut:
      return join_commut(el(e.left()), el(e.right()));
    case RewriteRule::LeftCommut: {
      SMBTree a = el(e.left());
      SMBTree b = el(e.right().left());
      SMBTree c = el(e.right().right());
      return trans3(join_assoc(a, b, c), max_cong(join_commut(a, b), equiv_refl(c)), equiv_symm(join_assoc(b, a, c)));
    }
  }
  throw std::logic_error("unknown rewrite rule");
}

Equiv certify_at(RewriteRule rule, const OrdExpr& before, const OrdExpr& after, const std::string& path,
                 std::size_t at, const Env& env) {
  if (at == path.size()) return rule_certificate(rule, before, env);
  switch (path[at]) {
    case 'a':
      return succ_cong(certify_at(rule, before.arg(), after.arg(), path, at + 1, env));
    case 'l':
      return max_cong(certify_at(rule, before.left(), after.left(), path, at + 1, env), equiv_refl(elab(before.right(), env)));
    case 'r':
      return max_cong(equiv_refl(elab(before.left(), env)), certify_at(rule, before.right(), after.right(), path, at + 1, env));
    case 'b':
      return lim_cong(elab(before, env), elab(after, env), [=](const IndexElem& k) {
        Env inner = env;
        inner.emplace_back(before.name(), position_of(IndexCode::nat(), k));
        return certify_at(rule, before.body(), after.body(), path, at + 1, inner);
      });
  }
  throw std::logic_error("bad rewrite path");
}

}  // namespace

Equiv certify(const RewriteStep& step) { return certify_at(step.rule, step.before, step.after, step.path, 0, {}); }

// ---- random expressions ------------------------------------------------------------

namespace {

const char* const kBinderNames[] = {"n", "m", "i", "j", "k"};

OrdExpr gen(std::mt19937_64& rng, const ExprShape& shape, int depth, std::vector<std::string>& scope) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  auto leaf = [&]() -> OrdExpr {
    int w = pick(scope.empty() ? 5 : 8);
    if (w == 0) return OrdExpr::zero();
    if (w <= 3) return OrdExpr::nat(rng() % (shape.max_numeral + 1));
    if (w == 4) return OrdExpr::omega();
    return OrdExpr::var(scope[rng() % scope.size()]);
  };
  if (depth <= 0) return leaf();
  bool can_bind = static_cast<int>(scope.size()) < shape.max_lim_nesting;
  int w = pick(can_bind ? 10 : 8);
  if (w < 2) return leaf();
  if (w < 4) return OrdExpr::succ(gen(rng, shape, depth - 1, scope));
  if (w < 8) {
    OrdExpr a = gen(rng, shape, depth - 1, scope);
    return OrdExpr::max(std::move(a), gen(rng, shape, depth - 1, scope));
  }
  std::string var = kBinderNames[scope.size() % std::size(kBinderNames)];
  scope.push_back(var);
  OrdExpr body = gen(rng, shape, depth - 1, scope);
  scope.pop_back();
  return OrdExpr::lim(std::move(var), std::move(body));
}

}  // namespace

OrdExpr random_expr(std::mt19937_64& rng, const ExprShape& shape) {
  std::vector<std::string> scope;
  return gen(rng, shape, shape.depth, scope);
}

}  // namespace smb

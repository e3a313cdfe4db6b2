#include "smb/index_universe.hpp"

#include <cctype>
#include <limits>

#include "smb/errors.hpp"

namespace smb {

IndexCode IndexCode::nat() {
  static const auto node = std::make_shared<const Node>(Node{Kind::Nat, 0, nullptr});
  return IndexCode(node);
}

IndexCode IndexCode::fin(Natural n) {
  return IndexCode(std::make_shared<const Node>(Node{Kind::Fin, n, nullptr}));
}

IndexCode IndexCode::maybe(IndexCode inner) {
  return IndexCode(std::make_shared<const Node>(Node{Kind::Maybe, 0, std::move(inner.node_)}));
}

Natural IndexCode::fin_size() const {
  if (kind() != Kind::Fin) throw std::logic_error("fin_size on a non-fin code");
  return node_->size;
}

IndexCode IndexCode::inner() const {
  if (kind() != Kind::Maybe) throw std::logic_error("inner on a non-maybe code");
  return IndexCode(node_->inner);
}

bool IndexCode::operator==(const IndexCode& other) const {
  const Node* a = node_.get();
  const Node* b = other.node_.get();
  while (a != b) {
    if (a->kind != b->kind) return false;
    if (a->kind == Kind::Fin) return a->size == b->size;
    if (a->kind == Kind::Nat) return true;
    a = a->inner.get();
    b = b->inner.get();
  }
  return true;
}

std::string IndexCode::to_string() const {
  switch (kind()) {
    case Kind::Nat:
      return "nat";
    case Kind::Fin:
      return "fin " + std::to_string(node_->size);
    case Kind::Maybe:
      return "maybe(" + inner().to_string() + ")";
  }
  return {};
}

namespace {

struct CodeParser {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool accept(const std::string& word) {
    skip_ws();
    if (text.compare(pos, word.size(), word) == 0) {
      pos += word.size();
      return true;
    }
    return false;
  }

  IndexCode parse() {
    if (accept("nat")) return IndexCode::nat();
    if (accept("fin")) {
      skip_ws();
      std::size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (start == pos) throw ParseError(pos, "natural", "missing fin size");
      return IndexCode::fin(std::stoull(text.substr(start, pos - start)));
    }
    if (accept("maybe")) {
      if (!accept("(")) throw ParseError(pos, "'('", "malformed maybe code");
      IndexCode inner = parse();
      if (!accept(")")) throw ParseError(pos, "')'", "malformed maybe code");
      return IndexCode::maybe(std::move(inner));
    }
    throw ParseError(pos, "nat | fin N | maybe(...)", "unknown index code");
  }
};

}  // namespace

IndexCode parse_index_code(const std::string& text) {
  CodeParser p{text};
  IndexCode c = p.parse();
  p.skip_ws();
  if (p.pos != text.size()) throw ParseError(p.pos, "end of input", "trailing characters");
  return c;
}

IndexElem IndexElem::nat(Natural n) { return IndexElem(Tag::Nat, n, nullptr); }
IndexElem IndexElem::fin(Natural i) { return IndexElem(Tag::Fin, i, nullptr); }
IndexElem IndexElem::nothing() { return IndexElem(Tag::Nothing, 0, nullptr); }
IndexElem IndexElem::just(IndexElem inner) {
  return IndexElem(Tag::Just, 0, std::make_shared<const IndexElem>(std::move(inner)));
}

const IndexElem& IndexElem::inner() const {
  if (tag_ != Tag::Just) throw std::logic_error("inner on a non-just element");
  return *inner_;
}

std::strong_ordering IndexElem::operator<=>(const IndexElem& other) const {
  if (auto c = tag_ <=> other.tag_; c != 0) return c;
  if (tag_ == Tag::Just) return *inner_ <=> *other.inner_;
  return value_ <=> other.value_;
}

std::string IndexElem::to_string() const {
  switch (tag_) {
    case Tag::Nat:
      return std::to_string(value_);
    case Tag::Fin:
      return "#" + std::to_string(value_);
    case Tag::Nothing:
      return "nothing";
    case Tag::Just:
      return "just(" + inner_->to_string() + ")";
  }
  return {};
}

bool belongs_to(const IndexElem& e, const IndexCode& c) {
  switch (c.kind()) {
    case IndexCode::Kind::Nat:
      return e.tag() == IndexElem::Tag::Nat;
    case IndexCode::Kind::Fin:
      return e.tag() == IndexElem::Tag::Fin && e.value() < c.fin_size();
    case IndexCode::Kind::Maybe:
      if (e.tag() == IndexElem::Tag::Nothing) return true;
      return e.tag() == IndexElem::Tag::Just && belongs_to(e.inner(), c.inner());
  }
  return false;
}

Cardinality cardinality_hint(const IndexCode& c) {
  using K = Cardinality::Kind;
  switch (c.kind()) {
    case IndexCode::Kind::Nat:
      return {K::CountablyInfinite};
    case IndexCode::Kind::Fin:
      return c.fin_size() == 0 ? Cardinality{K::Empty} : Cardinality{K::Finite, c.fin_size()};
    case IndexCode::Kind::Maybe: {
      Cardinality in = cardinality_hint(c.inner());
      if (in.kind == K::CountablyInfinite) return in;
      Natural n = in.kind == K::Empty ? 0 : in.count;
      if (n == std::numeric_limits<Natural>::max()) return {K::CountablyInfinite};
      return {K::Finite, n + 1};
    }
  }
  return {K::Empty};
}

IndexElem element_at(const IndexCode& c, Natural position) {
  switch (c.kind()) {
    case IndexCode::Kind::Nat:
      return IndexElem::nat(position);
    case IndexCode::Kind::Fin:
      if (position >= c.fin_size()) throw std::out_of_range("position outside fin code");
      return IndexElem::fin(position);
    case IndexCode::Kind::Maybe:
      if (position == 0) return IndexElem::nothing();
      return IndexElem::just(element_at(c.inner(), position - 1));
  }
  throw std::logic_error("unreachable");
}

Natural position_of(const IndexCode& c, const IndexElem& e) {
  if (!belongs_to(e, c)) throw std::invalid_argument("element " + e.to_string() + " not in " + c.to_string());
  switch (c.kind()) {
    case IndexCode::Kind::Nat:
    case IndexCode::Kind::Fin:
      return e.value();
    case IndexCode::Kind::Maybe:
      return e.is_nothing() ? 0 : 1 + position_of(c.inner(), e.inner());
  }
  throw std::logic_error("unreachable");
}

NatIso nat_iso() {
  return NatIso{IndexCode::nat(), [](const IndexElem& e) {
                  if (e.tag() != IndexElem::Tag::Nat) throw std::invalid_argument("not a natural index");
                  return e.value();
                },
                [](Natural n) { return IndexElem::nat(n); }};
}

NatIso maybe_nat_iso(const NatIso& inner) {
  return NatIso{IndexCode::maybe(inner.code),
                [f = inner.fun](const IndexElem& e) -> Natural {
                  if (e.is_nothing()) return 0;
                  return 1 + f(e.inner());
                },
                [g = inner.inv](Natural n) {
                  return n == 0 ? IndexElem::nothing() : IndexElem::just(g(n - 1));
                }};
}

IndexElem default_element(const IndexCode& c) {
  if (!is_inhabited(c)) throw EmptyIndex("code " + c.to_string() + " has no elements");
  return element_at(c, 0);
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::optional<IndexElem> sample(const IndexCode& c, std::uint64_t seed) {
  Cardinality card = cardinality_hint(c);
  std::uint64_t r = mix_seed(seed);
  switch (card.kind) {
    case Cardinality::Kind::Empty:
      return std::nullopt;
    case Cardinality::Kind::Finite:
      return element_at(c, r % card.count);
    case Cardinality::Kind::CountablyInfinite:
      return element_at(c, r % 64);
  }
  return std::nullopt;
}

}  // namespace smb

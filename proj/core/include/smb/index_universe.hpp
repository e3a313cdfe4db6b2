#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace smb {

using Natural = std::uint64_t;

/// Code for an index set that limits range over. The universe is closed:
/// naturals, finite sets {0..n-1}, and Maybe-wrapping of another code.
class IndexCode {
 public:
  enum class Kind { Nat, Fin, Maybe };

  static IndexCode nat();
  static IndexCode fin(Natural n);
  static IndexCode maybe(IndexCode inner);

  Kind kind() const noexcept { return node_->kind; }
  Natural fin_size() const;
  IndexCode inner() const;

  bool operator==(const IndexCode& other) const;

  /// Canonical text: `nat`, `fin N`, `maybe(<code>)`.
  std::string to_string() const;

 private:
  struct Node {
    Kind kind;
    Natural size = 0;
    std::shared_ptr<const Node> inner;
  };
  explicit IndexCode(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Parses the canonical textual form of a code.
IndexCode parse_index_code(const std::string& text);

/// An element of the interpretation of some code.
class IndexElem {
 public:
  enum class Tag { Nat, Fin, Nothing, Just };

  static IndexElem nat(Natural n);
  static IndexElem fin(Natural i);
  static IndexElem nothing();
  static IndexElem just(IndexElem inner);

  Tag tag() const noexcept { return tag_; }
  Natural value() const noexcept { return value_; }
  bool is_nothing() const noexcept { return tag_ == Tag::Nothing; }
  const IndexElem& inner() const;

  std::strong_ordering operator<=>(const IndexElem& other) const;
  bool operator==(const IndexElem& other) const { return (*this <=> other) == 0; }

  std::string to_string() const;

 private:
  IndexElem(Tag tag, Natural value, std::shared_ptr<const IndexElem> inner)
      : tag_(tag), value_(value), inner_(std::move(inner)) {}

  Tag tag_;
  Natural value_;
  std::shared_ptr<const IndexElem> inner_;
};

/// True when the element's tag matches the code (and is in range for Fin).
bool belongs_to(const IndexElem& e, const IndexCode& c);

struct Cardinality {
  enum class Kind { Empty, Finite, CountablyInfinite };
  Kind kind;
  Natural count = 0;  // meaningful only for Finite

  bool operator==(const Cardinality&) const = default;
};

Cardinality cardinality_hint(const IndexCode& c);

inline bool is_inhabited(const IndexCode& c) {
  return cardinality_hint(c).kind != Cardinality::Kind::Empty;
}

/// Enumeration of a code's elements: a bijection with [0, n) for finite
/// codes and with the naturals for infinite ones. Maybe codes put Nothing
/// first and shift the inner enumeration by one.
IndexElem element_at(const IndexCode& c, Natural position);
Natural position_of(const IndexCode& c, const IndexElem& e);

/// Bijection between the elements of an infinite code and the naturals.
struct NatIso {
  IndexCode code;
  std::function<Natural(const IndexElem&)> fun;
  std::function<IndexElem(Natural)> inv;
};

NatIso nat_iso();
/// Nothing maps to 0 and Just(e) to 1 + iso(e).
NatIso maybe_nat_iso(const NatIso& inner);

/// First element of a code; throws EmptyIndex when there is none.
IndexElem default_element(const IndexCode& c);

/// Deterministic element for a seed; nullopt exactly when c is empty.
std::optional<IndexElem> sample(const IndexCode& c, std::uint64_t seed);

/// SplitMix64 finalizer used for all seed derivation in the library.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace smb

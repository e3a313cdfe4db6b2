#include <gtest/gtest.h>

#include <set>

#include "smb/errors.hpp"
#include "smb/index_universe.hpp"

using namespace smb;

TEST(IndexUniverse, CardinalityHints) {
  EXPECT_EQ(cardinality_hint(IndexCode::fin(0)).kind, Cardinality::Kind::Empty);
  EXPECT_EQ(cardinality_hint(IndexCode::nat()).kind, Cardinality::Kind::CountablyInfinite);
  auto m = cardinality_hint(IndexCode::maybe(IndexCode::fin(0)));
  EXPECT_EQ(m.kind, Cardinality::Kind::Finite);
  EXPECT_EQ(m.count, 1u);
  EXPECT_EQ(cardinality_hint(IndexCode::maybe(IndexCode::nat())).kind, Cardinality::Kind::CountablyInfinite);
}

TEST(IndexUniverse, NatIsoRoundtrip) {
  auto iso = nat_iso();
  EXPECT_EQ(iso.fun(iso.inv(0)), 0u);
  EXPECT_EQ(iso.fun(iso.inv(7)), 7u);
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto e = *sample(IndexCode::nat(), s);
    EXPECT_EQ(iso.inv(iso.fun(e)), e);
  }
}

TEST(IndexUniverse, MaybeNatIsoPairing) {
  auto iso = maybe_nat_iso(nat_iso());
  EXPECT_EQ(iso.fun(IndexElem::nothing()), 0u);
  EXPECT_EQ(iso.fun(IndexElem::just(nat_iso().inv(0))), 1u);
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto e = *sample(iso.code, s * 7919);
    EXPECT_EQ(iso.inv(iso.fun(e)), e);
  }
}

TEST(IndexUniverse, MaybeNatIsoInjective) {
  auto iso = maybe_nat_iso(nat_iso());
  std::set<Natural> images;
  std::set<IndexElem> seen;
  for (Natural i = 0; i < 1000; ++i) {
    IndexElem e = i == 0 ? IndexElem::nothing() : IndexElem::just(IndexElem::nat(i - 1));
    seen.insert(e);
    images.insert(iso.fun(e));
  }
  EXPECT_EQ(images.size(), seen.size());
}

TEST(IndexUniverse, SampleBehaviour) {
  EXPECT_FALSE(sample(IndexCode::fin(0), 3).has_value());
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto e = sample(IndexCode::fin(3), s);
    ASSERT_TRUE(e.has_value());
    EXPECT_LT(e->value(), 3u);
    EXPECT_TRUE(belongs_to(*e, IndexCode::fin(3)));
  }
  EXPECT_EQ(*sample(IndexCode::nat(), 42), *sample(IndexCode::nat(), 42));
}

TEST(IndexUniverse, EmptyIffNoSample) {
  std::vector<IndexCode> codes = {IndexCode::fin(0),
                                  IndexCode::fin(1),
                                  IndexCode::fin(9),
                                  IndexCode::nat(),
                                  IndexCode::maybe(IndexCode::fin(0)),
                                  IndexCode::maybe(IndexCode::maybe(IndexCode::nat()))};
  for (const auto& c : codes) {
    bool empty = cardinality_hint(c).kind == Cardinality::Kind::Empty;
    for (std::uint64_t s = 0; s < 20; ++s) EXPECT_EQ(empty, !sample(c, s).has_value()) << c.to_string();
  }
}

TEST(IndexUniverse, FinEnumeratesExactly) {
  for (Natural n = 0; n < 10; ++n) {
    std::set<Natural> got;
    for (Natural i = 0; i < n; ++i) {
      auto e = element_at(IndexCode::fin(n), i);
      got.insert(e.value());
      EXPECT_EQ(position_of(IndexCode::fin(n), e), i);
    }
    EXPECT_EQ(got.size(), n);
    if (n > 0) {
      EXPECT_EQ(*got.begin(), 0u);
      EXPECT_EQ(*got.rbegin(), n - 1);
    }
  }
}

TEST(IndexUniverse, TextualCodes) {
  for (std::string s : {"nat", "fin 0", "fin 12", "maybe(nat)", "maybe(maybe(fin 3))"}) {
    EXPECT_EQ(parse_index_code(s).to_string(), s);
  }
  EXPECT_THROW(parse_index_code("maybe(nat"), ParseError);
  EXPECT_THROW(default_element(IndexCode::fin(0)), EmptyIndex);
  EXPECT_TRUE(default_element(IndexCode::maybe(IndexCode::fin(0))).is_nothing());
}

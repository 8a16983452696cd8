#include <doctest.h>

#include <set>

#include "grouptc/group.hpp"
#include "oracles.hpp"

using namespace gtc;

namespace {

const std::vector<std::string> kBuiltins{"c1", "c2", "c4", "c8", "klein", "d1", "d4", "d16", "o", "oh", "c2xd4"};

ErrorKind kind_of(const std::vector<std::vector<int>>& table) {
  try {
    validate_cayley_table(table);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("table was accepted");
  return ErrorKind::ParseError;
}

}  // namespace

TEST_SUITE("group") {
  TEST_CASE("C4 table validates with the expected structure") {
    const FiniteGroup g = validate_cayley_table({{0, 1, 2, 3}, {1, 2, 3, 0}, {2, 3, 0, 1}, {3, 0, 1, 2}});
    CHECK(g.order() == 4);
    CHECK(g.identity() == 0);
    CHECK(g.inv(1) == 3);
    CHECK(g.commutative());
  }

  TEST_CASE("trivial group") {
    const FiniteGroup g = validate_cayley_table({{0}});
    CHECK(g.order() == 1);
    CHECK(g.identity() == 0);
    CHECK(g.inv(0) == 0);
  }

  TEST_CASE("each violated axiom is named") {
    CHECK(kind_of({{0, 1}, {1, 1}}) == ErrorKind::NoInverse);
    CHECK(kind_of({{0, 1}, {1}}) == ErrorKind::NonSquareTable);
    CHECK(kind_of({{0, 2}, {1, 0}}) == ErrorKind::ClosureViolation);
    CHECK(kind_of({{1, 0}, {0, 0}}) == ErrorKind::NoIdentity);
    // Latin square with identity 0 and inverses, but not associative.
    CHECK(kind_of({{0, 1, 2, 3, 4}, {1, 0, 3, 4, 2}, {2, 4, 0, 1, 3}, {3, 2, 4, 0, 1}, {4, 3, 1, 2, 0}}) ==
          ErrorKind::AssociativityViolation);
    CHECK_THROWS_AS(validate_cayley_table({}), Error);
    CHECK_THROWS_AS(make_group(GroupSpec::cyclic(0)), Error);
  }

  TEST_CASE("built-in tables agree with independent constructions") {
    for (int n : {1, 2, 3, 4, 8}) CHECK(make_group(GroupSpec::cyclic(n)).table_rows() == oracle::cyclic_table(n));
    // The n-gon permutations are faithful only from n = 3 on.
    for (int n : {3, 4, 5, 16}) CHECK(make_group(GroupSpec::dihedral(n)).table_rows() == oracle::dihedral_table(n));
    CHECK(make_group(GroupSpec::klein()).table_rows() == oracle::klein_table());
  }

  TEST_CASE("built-in groups satisfy the axioms and round-trip through validation") {
    for (const auto& name : kBuiltins) {
      CAPTURE(name);
      const FiniteGroup g = make_group(parse_group_spec(name));
      CHECK(oracle::is_group(g.table_rows()));
      const FiniteGroup again = validate_cayley_table(g.table_rows(), g.element_names(), g.name());
      CHECK(again.table() == g.table());
      CHECK(again.inverses() == g.inverses());
      CHECK(again.identity() == g.identity());
      CHECK(again.conjugacy_classes() == g.conjugacy_classes());
      std::size_t total = 0;
      for (const auto& c : g.conjugacy_classes()) total += c.size();
      CHECK(total == static_cast<std::size_t>(g.order()));
      CHECK(static_cast<int>(g.conjugacy_classes().size()) == oracle::conjugacy_class_count(g));
    }
  }

  TEST_CASE("orders, commutativity and class counts") {
    const FiniteGroup klein = make_group(GroupSpec::klein());
    CHECK(klein.order() == 4);
    CHECK(klein.commutative());
    for (int x = 0; x < 4; ++x) CHECK(klein.mul(x, x) == klein.identity());
    const FiniteGroup d4 = make_group(GroupSpec::dihedral(4));
    CHECK(d4.order() == 8);
    CHECK_FALSE(d4.commutative());
    CHECK(d4.conjugacy_classes().size() == 5);
    const FiniteGroup o = make_group(GroupSpec::octahedral());
    CHECK(o.order() == 24);
    CHECK(o.conjugacy_classes().size() == 5);
    const FiniteGroup oh = make_group(GroupSpec::full_octahedral());
    CHECK(oh.order() == 48);
    CHECK(oh.conjugacy_classes().size() == 10);
  }

  TEST_CASE("octahedral elements are the 24 rotation matrices of the cube") {
    const auto& mats = octahedral_matrices();
    REQUIRE(mats.size() == 24);
    std::set<std::array<std::array<int, 3>, 3>> distinct(mats.begin(), mats.end());
    CHECK(distinct.size() == 24);
    const FiniteGroup o = make_group(GroupSpec::octahedral());
    for (int a = 0; a < 24; ++a)
      for (int b = 0; b < 24; ++b) {
        std::array<std::array<int, 3>, 3> p{};
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c)
            for (int k = 0; k < 3; ++k) p[r][c] += mats[a][r][k] * mats[b][k][c];
        CHECK(p == mats[o.mul(a, b)]);
      }
  }

  TEST_CASE("full octahedral group is O x C2 under the stored bijection") {
    const FiniteGroup oh = make_group(GroupSpec::full_octahedral());
    const FiniteGroup prod = make_group(GroupSpec::direct_product(GroupSpec::octahedral(), GroupSpec::cyclic(2)));
    const auto map = full_octahedral_product_bijection();
    CHECK(std::set<int>(map.begin(), map.end()).size() == 48);
    CHECK(is_isomorphism(oh, prod, map));
    auto broken = map;
    std::swap(broken[1], broken[2]);
    CHECK_FALSE(is_isomorphism(oh, prod, broken));
  }

  TEST_CASE("group names parse") {
    CHECK(parse_group_spec("C4") == GroupSpec::cyclic(4));
    CHECK(parse_group_spec("d16") == GroupSpec::dihedral(16));
    CHECK(parse_group_spec("v4") == GroupSpec::klein());
    CHECK(parse_group_spec("oh") == GroupSpec::full_octahedral());
    CHECK(parse_group_spec("octahedral") == GroupSpec::octahedral());
    CHECK(parse_group_spec("c2xd4") == GroupSpec::direct_product(GroupSpec::cyclic(2), GroupSpec::dihedral(4)));
    CHECK_THROWS_AS(parse_group_spec("q8"), Error);
  }

  TEST_CASE("JSON round trip keeps the built-in group kind") {
    for (const auto& name : kBuiltins) {
      const FiniteGroup g = make_group(parse_group_spec(name));
      const FiniteGroup back = group_from_json(nlohmann::json::parse(group_to_json(g).dump()));
      CHECK(back.table() == g.table());
      CHECK(back.element_names() == g.element_names());
      CHECK(back.spec() == g.spec());
    }
  }
}

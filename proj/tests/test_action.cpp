#include <doctest.h>

#include <set>

#include "grouptc/action.hpp"
#include "oracles.hpp"

using namespace gtc;

namespace {

std::vector<PermutationAction> all_actions() {
  std::vector<PermutationAction> out;
  for (const char* name : {"c1", "c4", "c8", "klein", "d4", "d16", "o", "oh"})
    out.push_back(regular_action(make_group_ptr(parse_group_spec(name))));
  for (const char* name : {"c1", "c2", "c4", "d1", "d2", "d4"})
    for (int n : {1, 2, 3, 4, 5}) out.push_back(square_grid_action(make_group_ptr(parse_group_spec(name)), n));
  for (const char* name : {"o", "oh"})
    for (int n : {1, 2, 3}) out.push_back(cube_grid_action(make_group_ptr(parse_group_spec(name)), n));
  return out;
}

}  // namespace

TEST_SUITE("action") {
  TEST_CASE("regular action rows") {
    const auto c4 = regular_action(make_group_ptr(GroupSpec::cyclic(4)));
    CHECK(c4.perm(1) == std::vector<int>{1, 2, 3, 0});
    const auto klein = regular_action(make_group_ptr(GroupSpec::klein()));
    const int h = klein.group().find("10");
    CHECK(klein.perm(h) == std::vector<int>{2, 3, 0, 1});
    for (const auto& a : all_actions()) {
      std::vector<int> id(a.domain_size());
      std::iota(id.begin(), id.end(), 0);
      CHECK(a.perm(a.group().identity()) == id);
    }
  }

  TEST_CASE("signal action examples") {
    const auto klein = regular_action(make_group_ptr(GroupSpec::klein()));
    const std::vector<double> theta{2, 0, 1, 1};
    CHECK(apply_signal_action(klein, klein.group().find("10"), theta) == std::vector<double>{1, 1, 2, 0});
    CHECK(apply_signal_action(klein, klein.group().identity(), theta) == theta);

    const auto grid = square_grid_action(make_group_ptr(GroupSpec::cyclic(4)), 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        std::vector<double> f(4, 0.0);
        f[i * 2 + j] = 1.0;
        const auto moved = apply_signal_action(grid, 1, f);
        std::vector<double> expect(4, 0.0);
        expect[j * 2 + (1 - i)] = 1.0;  // (i, j) -> (j, n-1-i)
        CHECK(moved == expect);
      }
  }

  TEST_CASE("grid actions") {
    const auto c4 = square_grid_action(make_group_ptr(GroupSpec::cyclic(4)), 2);
    std::set<int> orbit;
    for (int u = 0, k = 0; k < 4; ++k, u = c4.perm(1)[u]) orbit.insert(u);
    CHECK(orbit.size() == 4);

    const auto d4 = square_grid_action(make_group_ptr(GroupSpec::dihedral(4)), 3);
    for (int g = 0; g < 8; ++g) CHECK(d4.perm(g)[4] == 4);

    CHECK_THROWS_WITH_AS(square_grid_action(make_group_ptr(GroupSpec::cyclic(8)), 3),
                         doctest::Contains("UnsupportedGroup"), Error);
    CHECK_THROWS_AS(cube_grid_action(make_group_ptr(GroupSpec::dihedral(4)), 2), Error);

    for (const auto& [spec, count] :
         {std::pair{GroupSpec::octahedral(), 24}, std::pair{GroupSpec::full_octahedral(), 48}}) {
      const auto cube = cube_grid_action(make_group_ptr(spec), 2);
      CHECK(cube.domain_size() == 8);
      std::set<std::vector<int>> perms;
      for (int g = 0; g < count; ++g) perms.insert(cube.perm(g));
      CHECK(static_cast<int>(perms.size()) == count);
    }
  }

  TEST_CASE("action composition holds for every action") {
    std::mt19937_64 rng(7);
    for (const auto& a : all_actions()) {
      const auto f = oracle::random_signal(a.domain_size(), rng);
      const int n = a.group().order();
      for (int h1 = 0; h1 < n; ++h1)
        for (int h2 = 0; h2 < n; ++h2)
          REQUIRE(apply_signal_action(a, h1, apply_signal_action(a, h2, f)) ==
                  apply_signal_action(a, a.group().mul(h1, h2), f));
    }
  }

  TEST_CASE("invalid permutations are rejected") {
    auto g = make_group_ptr(GroupSpec::cyclic(2));
    CHECK_THROWS_AS(PermutationAction(g, {{0, 1}, {0, 0}}, {}), Error);
    CHECK_THROWS_AS(PermutationAction(g, {{1, 0}, {1, 0}}, {}), Error);
    CHECK_THROWS_AS(PermutationAction(g, {{0, 1}}, {}), Error);
    // Compatibility: C3 acting by a transposition is not a homomorphism.
    auto c3 = make_group_ptr(GroupSpec::cyclic(3));
    CHECK_THROWS_AS(PermutationAction(c3, {{0, 1}, {1, 0}, {1, 0}}, {}), Error);
    CHECK_THROWS_AS(apply_signal_action(regular_action(g), 1, std::vector<double>{1, 2, 3}), Error);
  }

  TEST_CASE("action dump format") {
    const auto csv = action_to_csv(regular_action(make_group_ptr(GroupSpec::cyclic(2))));
    CHECK(csv == "# v1\nelement,domain_index,image_index\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n");
  }
}

#include <doctest.h>

#include <map>

#include "grouptc/completeness.hpp"
#include "oracles.hpp"

using namespace gtc;

namespace {

std::span<const double> view(const std::vector<double>& v) { return {v.data(), v.size()}; }

}  // namespace

TEST_SUITE("completeness") {
  TEST_CASE("orbit oracle examples") {
    const auto klein = regular_action(make_group_ptr(GroupSpec::klein()));
    const std::vector<double> a{2, 0, 1, 1}, b{1, 1, 2, 0}, c{0, 1, 1, 2};
    const auto h = same_orbit(view(a), view(b), klein);
    REQUIRE(h.has_value());
    CHECK(klein.group().element_names()[*h] == "10");
    CHECK_FALSE(same_orbit(view(a), view(c), klein).has_value());
    CHECK(same_orbit(view(a), view(a), klein) == klein.group().identity());
    CHECK_THROWS_AS(same_orbit(view(a), view(std::vector<double>{1, 2}), klein), Error);
  }

  TEST_CASE("orbit oracle is symmetric and agrees with brute force") {
    std::mt19937_64 rng(41);
    for (const char* name : {"c4", "klein", "d4", "o"}) {
      const auto action = regular_action(make_group_ptr(parse_group_spec(name)));
      const FiniteGroup& g = action.group();
      for (int trial = 0; trial < 20; ++trial) {
        const auto x = oracle::random_int_signal(g.order(), rng, 0, 1);
        const auto y = oracle::random_int_signal(g.order(), rng, 0, 1);
        const std::vector<double> dx(x.begin(), x.end()), dy(y.begin(), y.end());
        const bool forward = same_orbit(view(dx), view(dy), action).has_value();
        CHECK(forward == same_orbit(view(dy), view(dx), action).has_value());
        CHECK(forward == !oracle::orbit_elements(g, x, y).empty());
        const int h = static_cast<int>(rng() % static_cast<unsigned>(g.order()));
        CHECK(same_orbit(view(dx), view(oracle::translate(g, h, dx)), action).has_value());
      }
    }
  }

  TEST_CASE("aligned distance") {
    std::mt19937_64 rng(42);
    const auto action = square_grid_action(make_group_ptr(GroupSpec::dihedral(4)), 3);
    const auto target = oracle::random_signal(9, rng);
    for (int k = 0; k < 8; ++k) {
      const auto x = apply_signal_action(action, k, target);
      const Alignment a = aligned_distance(view(target), view(x), action);
      CHECK(a.distance <= 1e-15);
      CHECK(apply_signal_action(action, a.element, x) == target);
    }
    std::vector<double> far = target;
    for (auto& v : far) v *= 2.0;
    CHECK(aligned_distance(view(target), view(far), action).distance == doctest::Approx(1.0));
  }

  TEST_CASE("C4 scans") {
    auto c4 = make_group_ptr(GroupSpec::cyclic(4));
    const CollisionReport filtered = completeness_scan(c4, {-2, -1, 0, 1, 2}, ScanFilter::NonzeroFourier);
    CHECK(filtered.signals == 464);
    CHECK(filtered.fingerprints == 116);
    CHECK(filtered.cross_orbit_pairs == 0);
    CHECK(filtered.witnesses.empty());
    const CollisionReport all = completeness_scan(c4, {-2, -1, 0, 1, 2}, ScanFilter::All, 3);
    CHECK(all.signals == 625);
    CHECK(all.cross_orbit_pairs == 400);
    CHECK(all.cross_orbit_both_singular == all.cross_orbit_pairs);
    CHECK(all.equal_tc_pairs == all.same_orbit_pairs + all.cross_orbit_pairs);
    CHECK(all.witnesses.size() == 16);
    CHECK(completeness_scan(c4, {-2, -1, 0, 1, 2}, ScanFilter::All, 1).witnesses == all.witnesses);
  }

  TEST_CASE("scans across groups") {
    for (const char* name : {"c2", "klein", "c4", "d4"}) {
      CAPTURE(name);
      auto g = make_group_ptr(parse_group_spec(name));
      const std::vector<int> values = g->order() > 4 ? std::vector<int>{0, 1, 2} : std::vector<int>{-1, 0, 1, 2};
      const CollisionReport filtered = completeness_scan(g, values, ScanFilter::NonzeroFourier, 2);
      CHECK(filtered.cross_orbit_pairs == 0);
      const CollisionReport all = completeness_scan(g, values, ScanFilter::All, 2);
      CHECK(all.cross_orbit_both_singular == all.cross_orbit_pairs);
      // Orbit sizes divide the group order, so orbits partition the signals.
      CHECK(all.signals >= all.fingerprints);
    }
    const CollisionReport single = completeness_scan(make_group_ptr(GroupSpec::klein()), {3}, ScanFilter::All);
    CHECK(single.signals == 1);
    CHECK(single.fingerprints == 1);
    CHECK(single.equal_tc_pairs == 0);
    CHECK_THROWS_AS(completeness_scan(make_group_ptr(GroupSpec::dihedral(16)), {0, 1}, ScanFilter::All), Error);
  }

  TEST_CASE("scan CSV") {
    const CollisionReport r = completeness_scan(make_group_ptr(GroupSpec::cyclic(2)), {0, 1}, ScanFilter::All);
    CHECK(
        collision_report_to_csv(r) ==
        "# "
        "v1\ngroup,values,filter,signals,fingerprints,equal_tc_pairs,same_orbit,cross_orbit,cross_orbit_both_singular\n"
        "C2,0 1,all,4,3,1,1,0,0\n");
  }

  TEST_CASE("metamer search smoke") {
    std::mt19937_64 rng(43);
    const auto action = square_grid_action(make_group_ptr(GroupSpec::dihedral(4)), 3);
    for (Variant v : {Variant::Max, Variant::Tc}) {
      const Model model(action, v, 2, 3, {6, 6, 6}, 7);
      const auto target = oracle::random_signal(9, rng, 0.0, 1.0);
      MetamerOptions opts;
      opts.restarts = 2;
      opts.steps = 20;
      opts.start_at_target = true;
      const MetamerReport r = metamer_search(model, view(target), 5, opts);
      CHECK(r.target_id == 5);
      REQUIRE(r.restarts.size() == 2);
      for (const auto& row : r.restarts) {
        CHECK(row.representation_distance <= 1e-12);
        CHECK(row.orbit_distance <= 1e-12);
        CHECK(row.converged);
        CHECK(row.in_orbit);
      }
      CHECK(r.metamers() == 0);

      opts.start_at_target = false;
      opts.seed = 3;
      const MetamerReport a = metamer_search(model, view(target), 0, opts, 1);
      const MetamerReport b = metamer_search(model, view(target), 0, opts, 2);
      REQUIRE(a.restarts.size() == b.restarts.size());
      for (std::size_t i = 0; i < a.restarts.size(); ++i) CHECK(a.restarts[i].input == b.restarts[i].input);
      CHECK(metamer_reports_to_csv({a}) == metamer_reports_to_csv({b}));
    }
  }
}

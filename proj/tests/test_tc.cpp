#include <doctest.h>

#include <map>

#include "grouptc/tc.hpp"
#include "oracles.hpp"

using namespace gtc;

namespace {

const std::vector<std::string> kGroups{"c1", "c4", "c8", "klein", "d4", "d16", "o", "oh"};

long long tc_at(const FiniteGroup& g, const std::vector<long long>& theta, const std::string& a, const std::string& b) {
  const auto full = triple_correlation_full<long long>(g, theta);
  return full[static_cast<std::size_t>(g.find(a) * g.order() + g.find(b))];
}

}  // namespace

TEST_SUITE("tc") {
  TEST_CASE("C4 worked example") {
    const FiniteGroup c4 = make_group(GroupSpec::cyclic(4));
    const std::vector<long long> theta{0, -1, 1, 2};
    const auto full = triple_correlation_full<long long>(c4, theta);
    CHECK(full[0 * 4 + 0] == 8);
    CHECK(full[0 * 4 + 1] == 3);
    CHECK(full[0 * 4 + 2] == -2);
    CHECK(full[0 * 4 + 3] == 3);
    CHECK(full[1 * 4 + 2] == -2);
    CHECK(full == oracle::triple_correlation(4, [](int a, int b) { return (a + b) % 4; }, theta));
    // Equalities listed with the example.
    CHECK(full[0 * 4 + 1] == full[3 * 4 + 3]);
    CHECK(full[1 * 4 + 2] == full[2 * 4 + 3]);
    const auto classes = symmetry_classes(c4);
    CHECK(triple_correlation_reduced<long long>(c4, classes, theta) == std::vector<long long>{8, 3, -2, 3, -2});
  }

  TEST_CASE("Klein worked example") {
    const FiniteGroup k = make_group(GroupSpec::klein());
    const std::vector<long long> theta{2, 0, 1, 1};
    CHECK(tc_at(k, theta, "00", "00") == 10);
    CHECK(tc_at(k, theta, "00", "01") == 2);
    // 2^2*1 + 0^2*1 + 1^2*2 + 1^2*0.
    CHECK(tc_at(k, theta, "00", "10") == 6);
    CHECK(tc_at(k, theta, "00", "11") == 6);
    CHECK(tc_at(k, theta, "01", "10") == 2);
    CHECK(tc_at(k, theta, "11", "10") == 2);
    // 0^2*1 + 1^2*2 + 1^2*0 + 2^2*1.
    const std::vector<long long> other{0, 1, 1, 2};
    CHECK(tc_at(k, other, "00", "10") == 6);
    CHECK(tc_at(k, other, "00", "10") ==
          oracle::triple_correlation(4, [](int a, int b) { return a ^ b; }, other)[k.find("10")]);
    CHECK(tc_at(k, other, "00", "01") == 6);
  }

  TEST_CASE("constant and delta signals") {
    for (const auto& name : kGroups) {
      const FiniteGroup g = make_group(parse_group_spec(name));
      const int n = g.order();
      const auto constant = triple_correlation_full<long long>(g, std::vector<long long>(n, 3));
      for (long long v : constant) CHECK(v == 27LL * n);
      std::vector<long long> delta(n, 0);
      delta[g.identity()] = 1;
      const auto d = triple_correlation_full<long long>(g, delta);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) CHECK(d[a * n + b] == (a == g.identity() && b == g.identity() ? 1 : 0));
    }
  }

  TEST_CASE("full table matches the definition") {
    std::mt19937_64 rng(1);
    for (const auto& name : kGroups) {
      const FiniteGroup g = make_group(parse_group_spec(name));
      const auto theta = oracle::random_int_signal(g.order(), rng);
      CHECK(triple_correlation_full<long long>(g, theta) ==
            oracle::triple_correlation(g.order(), [&](int a, int b) { return g.mul(a, b); }, theta));
    }
    const FiniteGroup d16 = make_group(GroupSpec::dihedral(16));
    const auto dih = oracle::dihedral_table(16);
    const auto theta = oracle::random_int_signal(32, rng);
    CHECK(triple_correlation_full<long long>(d16, theta) ==
          oracle::triple_correlation(32, [&](int a, int b) { return dih[a][b]; }, theta));
  }

  TEST_CASE("symmetry classes") {
    const auto c4 = symmetry_classes(make_group(GroupSpec::cyclic(4)));
    CHECK(c4.count() == 5);
    CHECK(c4.representatives == std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 2}});
    CHECK(c4.sizes == std::vector<int>{1, 3, 3, 3, 6});
    CHECK(symmetry_classes(make_group(GroupSpec::cyclic(1))).count() == 1);
    CHECK(symmetry_classes(make_group(GroupSpec::dihedral(4))).count() == 36);
    for (const char* name : {"d16", "o", "oh"}) {
      const int n = make_group(parse_group_spec(name)).order();
      CHECK(symmetry_classes(make_group(parse_group_spec(name))).count() == n * (n + 1) / 2);
    }
    for (const auto& name : kGroups) {
      const auto cls = symmetry_classes(make_group(parse_group_spec(name)));
      CHECK(std::accumulate(cls.sizes.begin(), cls.sizes.end(), 0) == cls.order * cls.order);
      for (int r = 0; r < cls.count(); ++r) {
        const auto [a, b] = cls.representatives[r];
        CHECK(cls.class_of[a * cls.order + b] == r);
        for (std::size_t p = 0; p < cls.class_of.size(); ++p)
          if (cls.class_of[p] == r)
            CHECK(std::make_pair(static_cast<int>(p) / cls.order, static_cast<int>(p) % cls.order) >=
                  cls.representatives[r]);
      }
    }
  }

  TEST_CASE("symmetries hold coefficient-wise and the reduced form expands exactly") {
    std::mt19937_64 rng(2);
    for (const auto& name : kGroups) {
      CAPTURE(name);
      const FiniteGroup g = make_group(parse_group_spec(name));
      const int n = g.order();
      const auto cls = symmetry_classes(g);
      for (int trial = 0; trial < 5; ++trial) {
        const auto theta = oracle::random_int_signal(n, rng);
        const auto full = triple_correlation_full<long long>(g, theta);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            REQUIRE(full[a * n + b] == full[b * n + a]);
            if (g.commutative()) {
              const int ai = g.inv(a);
              REQUIRE(full[a * n + b] == full[ai * n + g.mul(b, ai)]);
              REQUIRE(full[a * n + b] == full[g.mul(b, ai) * n + ai]);
              REQUIRE(full[a * n + b] == full[g.mul(a, g.inv(b)) * n + g.inv(b)]);
              REQUIRE(full[a * n + b] == full[g.inv(b) * n + g.mul(a, g.inv(b))]);
            }
            REQUIRE(full[a * n + b] == full[cls.representatives[cls.class_of[a * n + b]].first * n +
                                            cls.representatives[cls.class_of[a * n + b]].second]);
          }
        const auto reduced = triple_correlation_reduced<long long>(g, cls, theta);
        CHECK(expand_reduced<long long>(cls, reduced) == full);
      }
    }
  }

  TEST_CASE("invariance under every translate") {
    std::mt19937_64 rng(4);
    for (const auto& name : kGroups) {
      const FiniteGroup g = make_group(parse_group_spec(name));
      const auto theta = oracle::random_int_signal(g.order(), rng);
      const auto base = triple_correlation_full<long long>(g, theta);
      for (int h = 0; h < g.order(); ++h)
        REQUIRE(triple_correlation_full<long long>(g, oracle::translate(g, h, theta)) == base);
      const auto ftheta = oracle::random_signal(g.order(), rng);
      const auto fbase = triple_correlation_full<double>(g, ftheta);
      for (int h = 0; h < g.order(); ++h)
        CHECK(oracle::max_abs_diff(triple_correlation_full<double>(g, oracle::translate(g, h, ftheta)), fbase) <=
              1e-12 * oracle::max_abs(fbase));
    }
  }

  TEST_CASE("tc_features") {
    std::mt19937_64 rng(6);
    auto d4 = make_group_ptr(GroupSpec::dihedral(4));
    const auto cls = symmetry_classes(*d4);
    const auto one = oracle::random_signal(8, rng);
    CHECK(tc_features(FeatureMap{d4, 1, one}, cls) == triple_correlation_reduced<double>(*d4, cls, one));
    std::vector<double> twice = one;
    twice.insert(twice.end(), one.begin(), one.end());
    const auto f2 = tc_features(FeatureMap{d4, 2, twice}, cls);
    CHECK(std::vector<double>(f2.begin(), f2.begin() + 36) == std::vector<double>(f2.begin() + 36, f2.end()));
    const FeatureMap three{d4, 3, oracle::random_signal(24, rng)};
    const auto base = tc_features(three, cls);
    for (int h = 0; h < 8; ++h) CHECK(oracle::max_abs_diff(tc_features(translate(three, h), cls), base) <= 1e-12);
  }

  TEST_CASE("TC layer gradient") {
    std::mt19937_64 rng(8);
    for (const char* name : {"c4", "klein", "d4", "o"}) {
      const FiniteGroup g = make_group(parse_group_spec(name));
      const auto cls = symmetry_classes(g);
      for (int trial = 0; trial < 5; ++trial) {
        const auto theta = oracle::random_signal(g.order(), rng);
        const auto w = oracle::random_signal(cls.count(), rng);
        const auto grad = triple_correlation_reduced_backward(g, cls, theta, w);
        std::vector<double> x = theta, numeric(theta.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
          auto value = [&] {
            const auto t = triple_correlation_reduced<double>(g, cls, x);
            return std::inner_product(t.begin(), t.end(), w.begin(), 0.0);
          };
          x[i] = theta[i] + 1e-5;
          const double up = value();
          x[i] = theta[i] - 1e-5;
          const double down = value();
          x[i] = theta[i];
          numeric[i] = (up - down) / 2e-5;
        }
        CHECK(oracle::max_abs_diff(grad, numeric) <= 1e-5 * oracle::max_abs(numeric));
      }
    }
  }

  TEST_CASE("CSV layout") {
    const FiniteGroup c2 = make_group(GroupSpec::cyclic(2));
    const auto full = triple_correlation_full<double>(c2, std::vector<double>{1, 2});
    CHECK(tc_full_to_csv(2, full) == "# v1\ng1,g2,value\n0,0,9\n0,1,6\n1,0,6\n1,1,6\n");
    CHECK_THROWS_AS(triple_correlation_full<double>(c2, std::vector<double>{1, 2, 3}), Error);
  }
}

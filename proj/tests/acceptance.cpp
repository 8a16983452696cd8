// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "grouptc/completeness.hpp"
#include "grouptc/gconv.hpp"
#include "grouptc/io.hpp"
#include "grouptc/spectral.hpp"
#include "grouptc/tc.hpp"
#include "grouptc/train.hpp"
#include "oracles.hpp"

using namespace gtc;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

const std::vector<std::string> kInvarianceGroups{"c4", "c8", "klein", "d4", "d16", "o", "oh"};

long long tc_at(const FiniteGroup& g, const std::vector<long long>& theta, const std::string& a, const std::string& b) {
  return triple_correlation_full<long long>(g, theta)[static_cast<std::size_t>(g.find(a) * g.order() + g.find(b))];
}

void golden_vectors(Outcome& o) {
  const FiniteGroup c4 = make_group(GroupSpec::cyclic(4));
  const auto t = triple_correlation_full<long long>(c4, std::vector<long long>{0, -1, 1, 2});
  o.require(t[0] == 8 && t[1] == 3 && t[2] == -2 && t[3] == 3 && t[1 * 4 + 2] == -2, "C4 vector");
  const FiniteGroup k = make_group(GroupSpec::klein());
  const std::vector<long long> theta{2, 0, 1, 1}, other{0, 1, 1, 2};
  const std::vector<long long> got{tc_at(k, theta, "00", "00"), tc_at(k, theta, "00", "01"),
                                   tc_at(k, theta, "00", "10"), tc_at(k, theta, "00", "11"),
                                   tc_at(k, theta, "01", "10"), tc_at(k, theta, "11", "10")};
  o.require(got == std::vector<long long>{10, 2, 6, 6, 2, 2}, "Klein vector");
  o.require(tc_at(k, other, "00", "10") == 6, "Klein second signal");
  o.detail << "C4 8,3,-2,3,-2; Klein [2,0,1,1] 10,2,6,6,2,2; Klein [0,1,1,2] T(00,10)=6";
}

void invariance(Outcome& o) {
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (const auto& name : kInvarianceGroups) {
    const SpectralBasis basis(builtin_irreps(make_group_ptr(parse_group_spec(name))));
    const FiniteGroup& g = basis.group();
    bool exact = true;
    for (int trial = 0; trial < 100; ++trial) {
      const auto ints = oracle::random_int_signal(g.order(), rng);
      const auto base = triple_correlation_full<long long>(g, ints);
      const auto x = oracle::random_signal(g.order(), rng);
      const auto fbase = triple_correlation_full<double>(g, x);
      const Bispectrum bbase = bispectrum(gft(std::span<const double>(x), basis.irreps()), basis);
      const double scale = oracle::max_abs(fbase);
      for (int h = 0; h < g.order(); ++h) {
        exact = exact && triple_correlation_full<long long>(g, oracle::translate(g, h, ints)) == base;
        const auto moved = oracle::translate(g, h, x);
        worst = std::max(worst, oracle::max_abs_diff(triple_correlation_full<double>(g, moved), fbase) / scale);
        worst = std::max(worst, bispectrum_relative_difference(
                                    bbase, bispectrum(gft(std::span<const double>(moved), basis.irreps()), basis)));
      }
    }
    o.require(exact, name + " integer TC");
  }
  o.require(worst <= 1e-10, "float fingerprints");
  o.detail << "7 groups x 100 signals x all translates; integer TC exact, worst float relative deviation "
           << format_number(worst);
}

void equivariance(Outcome& o) {
  std::vector<PermutationAction> actions;
  for (const char* name : {"c4", "d4"})
    for (int n : {2, 3, 5, 9}) actions.push_back(square_grid_action(make_group_ptr(parse_group_spec(name)), n));
  for (const auto& name : kInvarianceGroups) actions.push_back(regular_action(make_group_ptr(parse_group_spec(name))));
  std::mt19937_64 rng(1002);
  int checked = 0;
  for (const auto& a : actions) {
    bool ok = true;
    for (int trial = 0; trial < 5; ++trial) {
      const auto bank_ints = oracle::random_int_signal(2 * a.domain_size(), rng);
      const auto f_ints = oracle::random_int_signal(a.domain_size(), rng);
      const FilterBank bank(2, a.domain_size(), std::vector<double>(bank_ints.begin(), bank_ints.end()));
      const std::vector<double> f(f_ints.begin(), f_ints.end());
      const FeatureMap base = g_convolve(bank, f, a);
      for (int h = 0; h < a.group().order(); ++h, ++checked)
        ok = ok && g_convolve(bank, apply_signal_action(a, h, f), a).values == translate(base, h).values;
    }
    o.require(ok, a.group().name() + " on " + std::to_string(a.domain_size()) + " points");
  }
  o.detail << actions.size() << " actions, " << checked << " (signal, h) cases with exact equality";
}

void symmetry_counts(Outcome& o) {
  const auto c4 = symmetry_classes(make_group(GroupSpec::cyclic(4)));
  o.require(c4.count() == 5 && c4.sizes == std::vector<int>{1, 3, 3, 3, 6}, "C4 classes");
  const FiniteGroup d4 = make_group(GroupSpec::dihedral(4));
  const auto d4c = symmetry_classes(d4);
  o.require(d4c.count() == 36, "D4 classes");
  std::mt19937_64 rng(1003);
  for (const auto& name : kInvarianceGroups) {
    const FiniteGroup g = make_group(parse_group_spec(name));
    const auto cls = symmetry_classes(g);
    for (int trial = 0; trial < 10; ++trial) {
      const auto theta = oracle::random_int_signal(g.order(), rng);
      o.require(expand_reduced<long long>(cls, triple_correlation_reduced<long long>(g, cls, theta)) ==
                    triple_correlation_full<long long>(g, theta),
                name + " expansion");
    }
  }
  o.detail << "C4 5 classes {1,3,3,3,6}, D4 " << d4c.count() << " classes, reduced TC expands exactly on 7 groups";
}

void spectral_validation(Outcome& o) {
  double hom = 0.0, orth = 0.0, cg = 0.0;
  int pairs = 0;
  for (const auto& name : std::vector<std::string>{"c1", "c4", "c8", "klein", "d4", "d16", "o", "oh", "c2xd4"}) {
    auto g = make_group_ptr(parse_group_spec(name));
    try {
      const SpectralBasis basis(builtin_irreps(g));
      const IrrepTable& t = basis.irreps();
      int dims = 0;
      for (int i = 0; i < t.size(); ++i) {
        dims += t.dim(i) * t.dim(i);
        for (int j = 0; j < t.size(); ++j)
          orth = std::max(orth, std::abs(t.character_inner(i, j) - (i == j ? 1.0 : 0.0)));
        for (int a = 0; a < g->order(); ++a) {
          const CMatrix& ra = t[i].matrices[a];
          hom = std::max(hom, (ra * ra.adjoint() - CMatrix::Identity(t.dim(i), t.dim(i))).cwiseAbs().maxCoeff());
          for (int b = 0; b < g->order(); ++b)
            hom = std::max(hom, (ra * t[i].matrices[b] - t[i].matrices[g->mul(a, b)]).cwiseAbs().maxCoeff());
        }
      }
      o.require(dims == g->order(), name + " dimension sum");
      for (int i = 0; i < t.size(); ++i)
        for (int j = 0; j < t.size(); ++j, ++pairs) cg = std::max(cg, basis.cg(i, j).residual(t));
    } catch (const Error& e) {
      o.require(false, name + ": " + e.what());
    }
  }
  const IrrepTable d4 = builtin_irreps(make_group_ptr(GroupSpec::dihedral(4)));
  const KroneckerTable k = kronecker_table(d4);
  const auto table2 = oracle::d4_kronecker();
  int equal = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      std::vector<int> row;
      for (int m = 0; m < 5; ++m) row.push_back(k.at(i, j, m));
      equal += row == table2[i][j];
    }
  o.require(hom <= 1e-10, "homomorphism/unitarity");
  o.require(orth <= 1e-10, "character orthogonality");
  o.require(equal == 25, "D4 Kronecker table");
  o.require(cg <= 1e-8, "CG residual");
  o.detail << "homomorphism/unitarity " << format_number(hom) << ", orthogonality " << format_number(orth)
           << ", D4 Kronecker " << equal << "/25, CG residual " << format_number(cg) << " over " << pairs << " pairs";
}

void plan_counts(Outcome& o) {
  std::map<std::string, int> expect{{"d4", 3}, {"d16", 9}, {"o", 4}};
  for (const auto& [name, length] : expect) {
    const IrrepTable t = builtin_irreps(make_group_ptr(parse_group_spec(name)));
    const RecoveryPlan p = recovery_plan(t, kronecker_table(t));
    o.require(p.feasible && p.length() == length, name + " plan length");
    o.detail << name << " " << p.length() << "/" << t.size() * t.size() << ", ";
  }
  const IrrepTable oh = builtin_irreps(make_group_ptr(GroupSpec::full_octahedral()));
  const RecoveryPlan p = recovery_plan(oh, kronecker_table(oh));
  o.require(!p.feasible, "Oh infeasible");
  o.detail << "oh infeasible (" << p.unrecovered.size() << " odd irreps unreachable)";
}

void recovery(Outcome& o) {
  std::mt19937_64 rng(1007);
  double worst_beta = 0.0, worst_orbit = 0.0;
  int recovered = 0;
  for (const char* name : {"c4", "c8", "klein", "d4", "d16", "o"}) {
    const SpectralBasis basis(builtin_irreps(make_group_ptr(parse_group_spec(name))));
    const RecoveryPlan plan = recovery_plan(basis.irreps(), basis.kronecker());
    const auto action = regular_action(basis.irreps().group_ptr());
    for (int trial = 0; trial < 50;) {
      const auto theta = oracle::random_signal(basis.group().order(), rng);
      const auto f = gft(std::span<const double>(theta), basis.irreps());
      if (!fourier_blocks_invertible(f)) continue;
      ++trial;
      try {
        RecoveryOptions opts;
        opts.seed = static_cast<std::uint64_t>(trial);
        const RecoveryResult r = recover_signal(bispectrum(f, basis, plan.pairs), plan, basis, opts);
        const Bispectrum again = bispectrum(gft(std::span<const double>(r.signal), basis.irreps()), basis);
        worst_beta = std::max(worst_beta, bispectrum_relative_difference(bispectrum(f, basis), again));
        if (basis.group().commutative())
          worst_orbit = std::max(worst_orbit, aligned_distance(theta, r.signal, action).distance);
        ++recovered;
      } catch (const Error& e) {
        o.require(false, std::string(name) + ": " + e.what());
      }
    }
  }
  o.require(worst_beta <= 1e-6, "bispectrum match");
  o.require(worst_orbit <= 1e-8, "orbit match");
  o.detail << recovered << "/300 recovered, worst bispectrum deviation " << format_number(worst_beta)
           << ", worst commutative aligned distance " << format_number(worst_orbit);
}

void completeness(Outcome& o) {
  struct Scan {
    const char* group;
    std::vector<int> values;
  };
  const int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (const Scan& s : {Scan{"c4", {-2, -1, 0, 1, 2}}, Scan{"klein", {0, 1, 2}}}) {
    auto g = make_group_ptr(parse_group_spec(s.group));
    const CollisionReport filtered = completeness_scan(g, s.values, ScanFilter::NonzeroFourier, threads);
    const CollisionReport all = completeness_scan(g, s.values, ScanFilter::All, threads);
    o.require(filtered.cross_orbit_pairs == 0, std::string(s.group) + " filtered collisions");
    o.require(all.cross_orbit_pairs == all.cross_orbit_both_singular, std::string(s.group) + " unfiltered collisions");
    o.detail << s.group << ": " << filtered.signals << " filtered signals, " << filtered.cross_orbit_pairs
             << " cross-orbit; unfiltered " << all.cross_orbit_pairs << " cross-orbit, "
             << all.cross_orbit_both_singular << " of them between signals with singular blocks; ";
  }
}

void gradients(Outcome& o) {
  double worst = 0.0;
  std::size_t rows = 0;
  for (Variant v : {Variant::Max, Variant::Tc})
    for (const auto& r : random_gradient_checks(GroupSpec::dihedral(4), v, 20, 1009)) {
      worst = std::max(worst, r.relative_error);
      ++rows;
    }
  o.require(worst <= 1e-4, "relative error");
  o.detail << "D4, 20 configurations per variant, " << rows << " tensors checked, worst relative error "
           << format_number(worst);
}

void desk_comparison(Outcome& o) {
  const Dataset data = synth_dataset(GroupSpec::dihedral(4), desk_synth_options());
  ComparisonOptions options;
  options.config = desk_train_config();
  options.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const ComparisonReport report = run_comparison(data, options);
  o.require(report.mean(Variant::Tc) >= report.mean(Variant::Max), "accuracy direction");
  o.require(report.parameter_gap() < 0.02, "parameter gap");
  o.detail << "accuracy tc " << format_number(report.mean(Variant::Tc)) << " vs max "
           << format_number(report.mean(Variant::Max)) << ", parameters " << report.tc_parameters << " vs "
           << report.max_parameters << "; ";

  // Seed-0 models of the comparison, rebuilt and retrained deterministically.
  const PermutationAction action = dataset_action(data);
  const MetamerOptions metamer = desk_metamer_options();
  for (Variant v : {Variant::Tc, Variant::Max}) {
    std::array<int, 3> hidden = options.hidden;
    if (v == Variant::Max) hidden[0] = report.max_first_width;
    Model model(action, v, options.channels, data.n_classes, hidden, 0);
    TrainConfig config = options.config;
    config.seed = 0;
    const double accuracy = train_model(model, data, config).test.accuracy;
    o.require(accuracy == report.runs[v == Variant::Max ? 0 : 1].test_accuracy, "seed-0 retrain reproduces");
    int converged = 0, metamers = 0;
    for (int t = 0; t < 10; ++t) {
      const MetamerReport r =
          metamer_search(model, data.test.inputs[static_cast<std::size_t>(t)], t, metamer, options.threads);
      converged += r.converged();
      metamers += r.metamers();
    }
    if (v == Variant::Tc) {
      o.require(metamers == 0, "tc metamers");
      o.require(converged > 0, "tc search converged at least once");
    } else {
      o.require(metamers >= 1, "max metamers");
    }
    o.detail << variant_name(v) << " metamers " << metamers << " of " << converged << " converged restarts (200); ";
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"golden TC vectors", golden_vectors},
      {"TC and bispectrum invariance", invariance},
      {"G-convolution equivariance", equivariance},
      {"symmetry classes", symmetry_counts},
      {"irrep, Kronecker and CG validation", spectral_validation},
      {"recovery plan lengths", plan_counts},
      {"signal recovery", recovery},
      {"desk-scale completeness scans", completeness},
      {"gradient checks", gradients},
      {"desk-scale Max vs TC comparison", desk_comparison},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.1fs", seconds);
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << ", " << timing
              << "): " << o.detail.str() << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

#include "grouptc/completeness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "grouptc/io.hpp"
#include "grouptc/spectral.hpp"
#include "grouptc/tc.hpp"

namespace gtc {

std::optional<int> same_orbit(std::span<const double> theta1, std::span<const double> theta2,
                              const PermutationAction& action, double tol) {
  if (theta1.size() != theta2.size()) throw Error(ErrorKind::LengthMismatch, "signals have different lengths");
  for (int h = 0; h < action.group().order(); ++h) {
    const auto moved = apply_signal_action<double>(action, h, theta1);
    bool match = true;
    for (std::size_t u = 0; u < moved.size() && match; ++u) match = std::abs(moved[u] - theta2[u]) <= tol;
    if (match) return h;
  }
  return std::nullopt;
}

Alignment aligned_distance(std::span<const double> target, std::span<const double> x, const PermutationAction& action) {
  if (target.size() != x.size()) throw Error(ErrorKind::LengthMismatch, "signals have different lengths");
  double norm = 0.0;
  for (double v : target) norm += v * v;
  norm = std::sqrt(norm);
  Alignment best{0, INFINITY};
  for (int h = 0; h < action.group().order(); ++h) {
    const auto moved = apply_signal_action<double>(action, h, x);
    double d = 0.0;
    for (std::size_t u = 0; u < moved.size(); ++u) d += (moved[u] - target[u]) * (moved[u] - target[u]);
    d = std::sqrt(d) / (norm > 0.0 ? norm : 1.0);
    if (d < best.distance) best = {h, d};
  }
  return best;
}

std::string scan_filter_name(ScanFilter f) { return f == ScanFilter::All ? "all" : "nonzero-fourier"; }

ScanFilter parse_scan_filter(const std::string& text) {
  if (text == "all") return ScanFilter::All;
  if (text == "nonzero-fourier") return ScanFilter::NonzeroFourier;
  throw Error(ErrorKind::BadFlag, "filter must be all or nonzero-fourier, got '" + text + "'");
}

CollisionReport completeness_scan(const GroupPtr& group, const std::vector<int>& values, ScanFilter filter, int threads,
                                  std::size_t max_witnesses) {
  if (values.empty()) throw Error(ErrorKind::BadFlag, "value set is empty");
  const int n = group->order();
  const auto v = static_cast<std::uint64_t>(values.size());
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    total *= v;
    if (total > kMaxScanSignals)
      throw Error(ErrorKind::SearchSpaceTooLarge, std::to_string(values.size()) + "^" + std::to_string(n) +
                                                      " signals exceed the limit of " +
                                                      std::to_string(kMaxScanSignals));
  }

  const IrrepTable irreps = builtin_irreps(group);
  const SymmetryClasses classes = symmetry_classes(*group);
  auto decode = [&](std::uint64_t index) {
    std::vector<std::int64_t> s(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
      s[static_cast<std::size_t>(i)] = values[index % v];
      index /= v;
    }
    return s;
  };
  auto invertible = [&](const std::vector<std::int64_t>& s) {
    std::vector<double> d(s.begin(), s.end());
    return fourier_blocks_invertible(gft(std::span<const double>(d), irreps), 1e-9);
  };

  // Fingerprints per chunk, merged in signal order.
  const int chunks = std::max(1, threads) * 4;
  std::vector<std::vector<std::pair<std::vector<std::int64_t>, std::uint64_t>>> parts(static_cast<std::size_t>(chunks));
  parallel_for(chunks, threads, [&](int c) {
    const std::uint64_t begin = total * c / chunks, end = total * (c + 1) / chunks;
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto s = decode(i);
      if (filter == ScanFilter::NonzeroFourier && !invertible(s)) continue;
      parts[static_cast<std::size_t>(c)].emplace_back(
          triple_correlation_reduced<std::int64_t>(*group, classes, std::span<const std::int64_t>(s)), i);
    }
  });
  std::map<std::vector<std::int64_t>, std::vector<std::uint64_t>> buckets;
  CollisionReport report;
  report.group = group->name();
  report.values = values;
  report.filter = filter;
  for (auto& part : parts)
    for (auto& [fp, idx] : part) {
      buckets[fp].push_back(idx);
      ++report.signals;
    }
  report.fingerprints = buckets.size();

  const PermutationAction action = regular_action(group);
  for (const auto& [fp, members] : buckets) {
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        ++report.equal_tc_pairs;
        const auto sa = decode(members[a]), sb = decode(members[b]);
        const std::vector<double> da(sa.begin(), sa.end()), db(sb.begin(), sb.end());
        if (same_orbit(da, db, action, 0.0)) {
          ++report.same_orbit_pairs;
          continue;
        }
        ++report.cross_orbit_pairs;
        if (!invertible(sa) && !invertible(sb)) ++report.cross_orbit_both_singular;
        if (report.witnesses.size() < max_witnesses)
          report.witnesses.emplace_back(std::vector<int>(sa.begin(), sa.end()), std::vector<int>(sb.begin(), sb.end()));
      }
  }
  return report;
}

namespace {

std::string join(const std::vector<int>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

std::string collision_report_to_csv(const CollisionReport& r) {
  std::ostringstream os;
  os << "# "
        "v1\ngroup,values,filter,signals,fingerprints,equal_tc_pairs,same_orbit,cross_orbit,cross_orbit_both_singular\n"
     << r.group << ',' << join(r.values, ' ') << ',' << scan_filter_name(r.filter) << ',' << r.signals << ','
     << r.fingerprints << ',' << r.equal_tc_pairs << ',' << r.same_orbit_pairs << ',' << r.cross_orbit_pairs << ','
     << r.cross_orbit_both_singular << '\n';
  if (!r.witnesses.empty()) {
    os << "# cross-orbit witnesses\nsignal_a,signal_b\n";
    for (const auto& [a, b] : r.witnesses) os << join(a, ' ') << ',' << join(b, ' ') << '\n';
  }
  return os.str();
}

int MetamerReport::converged() const {
  return static_cast<int>(std::count_if(restarts.begin(), restarts.end(), [](const auto& r) { return r.converged; }));
}

int MetamerReport::metamers() const {
  return static_cast<int>(
      std::count_if(restarts.begin(), restarts.end(), [](const auto& r) { return r.converged && !r.in_orbit; }));
}

MetamerOptions desk_metamer_options() {
  MetamerOptions o;
  o.lr = 100.0 * desk_train_config().lr;
  return o;
}

MetamerReport metamer_search(const Model& model, std::span<const double> target, int target_id,
                             const MetamerOptions& options, int threads) {
  const int m = model.action().domain_size();
  if (static_cast<int>(target.size()) != m) throw Error(ErrorKind::LengthMismatch, "target does not match the model");
  const Matrix target_row = Eigen::Map<const Eigen::RowVectorXd>(target.data(), m);
  const ForwardCache target_pass = forward(model, target_row, Mode::Eval);
  const Eigen::RowVectorXd rep_t = target_pass.representation.row(0);
  const double rep_norm = std::max(rep_t.norm(), 1e-300);

  MetamerReport report;
  report.target_id = target_id;
  Eigen::Index label = 0;
  target_pass.logits.row(0).maxCoeff(&label);
  report.target_label = static_cast<int>(label);
  report.restarts.resize(static_cast<std::size_t>(options.restarts));

  TrainConfig opt;
  opt.lr = options.lr;
  opt.weight_decay = 0.0;
  const Matrix no_logit_grad;

  parallel_for(options.restarts, threads, [&](int restart) {
    std::seed_seq seq{static_cast<std::uint64_t>(options.seed), static_cast<std::uint64_t>(target_id),
                      static_cast<std::uint64_t>(restart)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Tensor x({m});
    for (int u = 0; u < m; ++u) x.data[u] = options.start_at_target ? target[u] : unit(rng);

    Adam adam({x.size()}, opt);
    PlateauScheduler scheduler(options.lr, opt.plateau_factor, opt.plateau_patience, opt.plateau_threshold,
                               options.min_lr);
    double lr = options.lr, window_loss = 0.0, best_window = INFINITY, dist = INFINITY;
    for (int step = 0; step < options.steps; ++step) {
      const Matrix row = Eigen::Map<const Eigen::RowVectorXd>(x.data.data(), m);
      const ForwardCache cache = forward(model, row, Mode::Eval, false);
      const Eigen::RowVectorXd diff = cache.representation.row(0) - rep_t;
      dist = diff.norm() / rep_norm;
      if (dist <= 0.1 * options.convergence) break;
      const Matrix drep = 2.0 * diff / (rep_norm * rep_norm);
      const Gradients g = backward(model, cache, no_logit_grad, &drep);
      std::vector<double> grad(g.inputs.data(), g.inputs.data() + m);
      adam.step({&x}, {grad}, lr);
      window_loss += dist * dist;
      if ((step + 1) % options.window == 0) {
        const double mean_loss = window_loss / options.window;
        window_loss = 0.0;
        // Stalled at the floor rate: a local minimum, not a slow descent.
        if (lr <= options.min_lr && mean_loss > best_window * (1.0 - 1e-3)) break;
        best_window = std::min(best_window, mean_loss);
        lr = scheduler.step(mean_loss);
      }
    }
    const Matrix row = Eigen::Map<const Eigen::RowVectorXd>(x.data.data(), m);
    const ForwardCache final_pass = forward(model, row, Mode::Eval);
    MetamerRestart r;
    r.restart = restart;
    r.representation_distance = (final_pass.representation.row(0) - rep_t).norm() / rep_norm;
    const Alignment align = aligned_distance(target, x.data, model.action());
    r.orbit_distance = align.distance;
    r.best_element = align.element;
    r.converged = r.representation_distance <= options.convergence;
    r.in_orbit = r.orbit_distance <= options.orbit_tolerance;
    Eigen::Index predicted = 0;
    final_pass.logits.row(0).maxCoeff(&predicted);
    r.label = static_cast<int>(predicted);
    r.input = x.data;
    report.restarts[static_cast<std::size_t>(restart)] = std::move(r);
  });
  return report;
}

std::string metamer_reports_to_csv(const std::vector<MetamerReport>& reports) {
  std::ostringstream os;
  os << "# v1\ntarget,target_label,restart,representation_distance,orbit_distance,best_element,converged,in_orbit,"
        "label\n";
  for (const auto& rep : reports)
    for (const auto& r : rep.restarts)
      os << rep.target_id << ',' << rep.target_label << ',' << r.restart << ','
         << format_number(r.representation_distance) << ',' << format_number(r.orbit_distance) << ',' << r.best_element
         << ',' << (r.converged ? 1 : 0) << ',' << (r.in_orbit ? 1 : 0) << ',' << r.label << '\n';
  return os.str();
}

}  // namespace gtc

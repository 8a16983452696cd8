#include "grouptc/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include "grouptc/completeness.hpp"
#include "grouptc/gconv.hpp"
#include "grouptc/io.hpp"
#include "grouptc/spectral.hpp"
#include "grouptc/tc.hpp"
#include "grouptc/train.hpp"

namespace gtc {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IoError: return kExitIo;
    case ErrorKind::InfeasiblePlan:
    case ErrorKind::GaugeResolutionFailure:
    case ErrorKind::SingularAnchor:
    case ErrorKind::ZeroDCComponent: return kExitInfeasible;
    default: return kExitValidation;
  }
}

namespace {

// Ordered key=value pairs printed as one line.
class Summary {
 public:
  template <typename T>
  void add(const std::string& key, const T& value) {
    std::ostringstream os;
    if constexpr (std::is_same_v<T, double>)
      os << format_number(value);
    else if constexpr (std::is_same_v<T, bool>)
      os << (value ? "true" : "false");
    else
      os << value;
    pairs_.emplace_back(key, os.str());
  }
  std::string line() const {
    std::string s;
    for (const auto& [k, v] : pairs_) s += (s.empty() ? "" : " ") + k + "=" + v;
    return s;
  }

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
};

nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, what + " is not valid JSON: " + e.what());
  }
}

// A group argument is either a Cayley-table file or a built-in name.
GroupPtr load_group(const std::string& arg) {
  if (std::filesystem::is_regular_file(arg))
    return std::make_shared<const FiniteGroup>(group_from_json(parse_json(read_text_file(arg), arg)));
  return make_group_ptr(parse_group_spec(arg));
}

IrrepTable load_irreps(const GroupPtr& group, const std::string& path) {
  if (path.empty()) return builtin_irreps(group);
  return irreps_from_json(group, parse_json(read_text_file(path), path));
}

PermutationAction make_action(const GroupPtr& group, int grid, int cube) {
  if (grid > 0 && cube > 0) throw Error(ErrorKind::BadFlag, "--grid and --cube are exclusive");
  if (grid > 0) return square_grid_action(group, grid);
  if (cube > 0) return cube_grid_action(group, cube);
  return regular_action(group);
}

std::vector<int> parse_values(const std::string& text) {
  std::vector<int> out;
  auto to_int = [&](const std::string& s) {
    const double v = parse_number(s);
    if (v != std::floor(v) || std::abs(v) > 1e6) throw Error(ErrorKind::BadFlag, "value '" + s + "' is not an integer");
    return static_cast<int>(v);
  };
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = to_int(text.substr(0, dots)), hi = to_int(text.substr(dots + 2));
    if (lo > hi) throw Error(ErrorKind::BadFlag, "empty range " + text);
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(to_int(item));
  return out;
}

std::string complex_row(const Complex& z) { return format_number(z.real()) + "," + format_number(z.imag()); }

std::string fourier_to_csv(const FourierCoefficients& f, const IrrepTable& irreps) {
  std::ostringstream os;
  os << "# v1\nirrep,row,col,re,im\n";
  for (int i = 0; i < irreps.size(); ++i)
    for (Eigen::Index r = 0; r < f[i].rows(); ++r)
      for (Eigen::Index c = 0; c < f[i].cols(); ++c)
        os << irreps[i].name << ',' << r << ',' << c << ',' << complex_row(f[i](r, c)) << '\n';
  return os.str();
}

std::string bispectrum_to_csv(const Bispectrum& beta) {
  std::ostringstream os;
  os << "# v1\ni,j,row,col,re,im\n";
  for (const auto& [pair, m] : beta)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        os << pair.first << ',' << pair.second << ',' << r << ',' << c << ',' << complex_row(m(r, c)) << '\n';
  return os.str();
}

Bispectrum bispectrum_from_csv(const std::string& text) {
  std::map<IrrepPair, std::vector<std::array<double, 4>>> entries;
  for (const auto& row : parse_matrix_csv(text)) {
    if (row.size() != 6) throw Error(ErrorKind::ParseError, "bispectrum rows need 6 columns: i,j,row,col,re,im");
    entries[{static_cast<int>(row[0]), static_cast<int>(row[1])}].push_back({row[2], row[3], row[4], row[5]});
  }
  Bispectrum beta;
  for (const auto& [pair, cells] : entries) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& c : cells) {
      rows = std::max(rows, static_cast<Eigen::Index>(c[0]) + 1);
      cols = std::max(cols, static_cast<Eigen::Index>(c[1]) + 1);
    }
    CMatrix m = CMatrix::Zero(rows, cols);
    for (const auto& c : cells) m(static_cast<Eigen::Index>(c[0]), static_cast<Eigen::Index>(c[1])) = {c[2], c[3]};
    beta[pair] = m;
  }
  return beta;
}

bool all_integral(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == std::floor(x) && std::abs(x) < (1 << 20); });
}

struct DataFlags {
  SynthOptions synth = desk_synth_options();
  std::string group = "d4";
  std::string idx_images, idx_labels;
  int limit = 0;
  int size = 9;

  void add(CLI::App* app) {
    app->add_option("--group", group, "d4, c4, o or oh (synthetic data)");
    app->add_option("--classes", synth.n_classes, "synthetic classes");
    app->add_option("--per-class", synth.n_per_class, "synthetic train+val samples per class");
    app->add_option("--test-per-class", synth.n_test_per_class, "synthetic test samples per class");
    app->add_option("--grid", synth.grid, "grid side (cube side for o/oh)");
    app->add_option("--noise", synth.noise, "Gaussian noise std");
    app->add_option("--jitter", synth.jitter, "pixel displacement probability");
    app->add_option("--data-seed", synth.seed, "dataset seed");
    app->add_option("--idx-images", idx_images, "IDX image file (D4, replaces synthetic data)");
    app->add_option("--idx-labels", idx_labels, "IDX label file");
    app->add_option("--limit", limit, "IDX samples to keep (0 = all)");
    app->add_option("--size", size, "IDX resize side");
  }

  Dataset load() const {
    if (idx_images.empty() != idx_labels.empty())
      throw Error(ErrorKind::BadFlag, "--idx-images and --idx-labels go together");
    if (!idx_images.empty()) return load_idx_dataset(idx_images, idx_labels, limit, size, synth.seed);
    return synth_dataset(parse_group_spec(group), synth);
  }
};

struct TrainFlags {
  TrainConfig config = desk_train_config();

  void add(CLI::App* app) {
    app->add_option("--lr", config.lr, "initial learning rate");
    app->add_option("--min-lr", config.min_lr, "plateau floor");
    app->add_option("--weight-decay", config.weight_decay, "decoupled weight decay");
    app->add_option("--epochs", config.epochs, "epochs");
    app->add_option("--batch", config.batch_size, "batch size");
    app->add_option("--patience", config.plateau_patience, "plateau patience");
    app->add_option("--factor", config.plateau_factor, "plateau factor");
  }
};

std::array<int, 3> hidden_widths(const std::vector<int>& v) {
  if (v.size() != 3) throw Error(ErrorKind::BadFlag, "--hidden takes three widths");
  return {v[0], v[1], v[2]};
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Signal processing on finite groups: G-convolution, triple correlation, bispectrum.", "grouptc"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all help");
    build(app);
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out_, err_);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e, out_, err_);
    } catch (const CLI::ParseError& e) {
      const bool leaf =
          std::any_of(handlers_.begin(), handlers_.end(), [](const auto& h) { return h.first->parsed(); });
      const ErrorKind kind = leaf ? ErrorKind::BadFlag : ErrorKind::UnknownCommand;
      err_ << "error: " << error_name(kind) << ": " << e.what() << '\n';
      Summary s;
      s.add("status", "error");
      s.add("error", error_name(kind));
      err_ << s.line() << '\n';
      return kExitValidation;
    }
    for (const auto& [sub, handler] : handlers_) {
      if (!sub->parsed()) continue;
      command_ = sub->get_parent()->get_name() + "." + sub->get_name();
      try {
        Summary s;
        s.add("command", command_);
        const int code = handler(s);
        err_ << s.line() << '\n';
        return code;
      } catch (const Error& e) {
        err_ << "error: " << e.what() << '\n';
        Summary s;
        s.add("command", command_);
        s.add("status", "error");
        s.add("error", e.name());
        err_ << s.line() << '\n';
        return exit_code_for(e.kind());
      }
    }
    throw Error(ErrorKind::UnknownCommand, "no command selected");
  }

 private:
  using Handler = std::function<int(Summary&)>;

  void emit(const std::string& text, Summary& s) {
    if (out_path_.empty()) {
      out_ << text;
    } else {
      write_text_file(out_path_, text);
      s.add("out", out_path_);
    }
  }

  CLI::App* command(CLI::App* parent, const std::string& name, const std::string& help, Handler h) {
    auto* sub = parent->add_subcommand(name, help);
    handlers_.emplace_back(sub, std::move(h));
    return sub;
  }

  void add_out(CLI::App* app) { app->add_option("--out", out_path_, "output file (stdout when omitted)"); }

  void build(CLI::App& app) {
    build_group(app);
    build_action(app);
    build_conv(app);
    build_tc(app);
    build_spectral(app);
    build_completeness(app);
    build_train(app);
  }

  void build_group(CLI::App& app) {
    auto* group = app.add_subcommand("group", "Cayley tables");
    group->require_subcommand(1);
    auto* make = command(group, "make", "write a built-in group as a Cayley-table file", [this](Summary& s) {
      const FiniteGroup g = make_group(parse_group_spec(kind_));
      emit(group_to_json(g).dump(2) + "\n", s);
      s.add("group", g.name());
      s.add("order", g.order());
      s.add("commutative", g.commutative());
      s.add("conjugacy_classes", g.conjugacy_classes().size());
      return kExitOk;
    });
    make->add_option("--kind", kind_, "c<n>, d<n>, klein, o, oh or products such as d4xc2")->required();
    add_out(make);

    auto* validate = command(group, "validate", "check the group axioms of a Cayley-table file", [this](Summary& s) {
      const FiniteGroup g = group_from_json(parse_json(read_text_file(table_), table_));
      s.add("valid", true);
      s.add("group", g.name());
      s.add("order", g.order());
      s.add("commutative", g.commutative());
      s.add("conjugacy_classes", g.conjugacy_classes().size());
      return kExitOk;
    });
    validate->add_option("--table", table_, "Cayley-table JSON")->required();
  }

  void add_domain(CLI::App* app) {
    app->add_option("--grid", grid_, "act on an n x n pixel grid");
    app->add_option("--cube", cube_, "act on an n x n x n voxel cube");
  }

  void build_action(CLI::App& app) {
    auto* action = app.add_subcommand("action", "group actions");
    action->require_subcommand(1);
    auto* dump = command(action, "dump", "write the permutation of every element", [this](Summary& s) {
      const PermutationAction a = make_action(load_group(group_), grid_, cube_);
      emit(action_to_csv(a), s);
      s.add("group", a.group().name());
      s.add("domain_size", a.domain_size());
      return kExitOk;
    });
    dump->add_option("--group", group_, "built-in group name or Cayley-table file")->required();
    add_domain(dump);
    add_out(dump);
  }

  void build_conv(CLI::App& app) {
    auto* conv = app.add_subcommand("conv", "G-convolution");
    conv->require_subcommand(1);
    auto* run = command(conv, "run", "convolve a signal with a filter bank", [this](Summary& s) {
      const PermutationAction a = make_action(load_group(group_), grid_, cube_);
      const auto f = parse_signal_csv(read_text_file(signal_));
      const auto rows = parse_matrix_csv(read_text_file(filters_));
      std::vector<double> values;
      for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != a.domain_size())
          throw Error(ErrorKind::LengthMismatch, "filter rows need " + std::to_string(a.domain_size()) + " values");
        values.insert(values.end(), r.begin(), r.end());
      }
      const FilterBank bank(static_cast<int>(rows.size()), a.domain_size(), values);
      const FeatureMap theta = g_convolve(bank, f, a);
      if (max_pool_) {
        std::ostringstream os;
        os << "# v1\nchannel,value\n";
        const auto pooled = max_g_pool(theta);
        for (std::size_t k = 0; k < pooled.size(); ++k) os << k << ',' << format_number(pooled[k]) << '\n';
        emit(os.str(), s);
      } else {
        emit(feature_map_to_csv(theta), s);
      }
      s.add("channels", theta.channels);
      s.add("order", theta.order());
      return kExitOk;
    });
    run->add_option("--group", group_, "built-in group name or Cayley-table file")->required();
    run->add_option("--signal", signal_, "signal CSV over the domain")->required();
    run->add_option("--filters", filters_, "filter CSV, one filter per row")->required();
    run->add_flag("--max-pool", max_pool_, "emit the per-channel maximum instead of the feature map");
    add_domain(run);
    add_out(run);
  }

  void build_tc(CLI::App& app) {
    auto* tc = app.add_subcommand("tc", "triple correlation");
    tc->require_subcommand(1);
    auto* compute = command(tc, "compute", "triple correlation of a group signal", [this](Summary& s) {
      const GroupPtr g = load_group(group_);
      const auto theta = parse_signal_csv(read_text_file(signal_));
      std::vector<double> values;
      const SymmetryClasses classes = symmetry_classes(*g);
      if (all_integral(theta)) {
        const std::vector<std::int64_t> exact(theta.begin(), theta.end());
        const auto t = reduced_ ? triple_correlation_reduced<std::int64_t>(*g, classes, exact)
                                : triple_correlation_full<std::int64_t>(*g, exact);
        values.assign(t.begin(), t.end());
      } else {
        values = reduced_ ? triple_correlation_reduced<double>(*g, classes, theta)
                          : triple_correlation_full<double>(*g, theta);
      }
      emit(reduced_ ? tc_reduced_to_csv(classes, values) : tc_full_to_csv(g->order(), values), s);
      s.add("group", g->name());
      s.add("coefficients", values.size());
      s.add("exact", all_integral(theta));
      return kExitOk;
    });
    compute->add_option("--group", group_, "built-in group name or Cayley-table file")->required();
    compute->add_option("--signal", signal_, "signal CSV indexed by group element")->required();
    compute->add_flag("--reduced", reduced_, "one coefficient per symmetry class");
    add_out(compute);
  }

  void build_spectral(CLI::App& app) {
    auto* spectral = app.add_subcommand("spectral", "group Fourier analysis");
    spectral->require_subcommand(1);
    auto common = [this](CLI::App* sub, bool signal) {
      sub->add_option("--group", group_, "built-in group name or Cayley-table file")->required();
      sub->add_option("--irreps", irreps_, "irrep JSON (built-in table when omitted)");
      if (signal) sub->add_option("--signal", signal_, "signal CSV indexed by group element")->required();
      add_out(sub);
    };

    common(command(spectral, "gft", "Fourier blocks of a signal",
                   [this](Summary& s) {
                     const GroupPtr g = load_group(group_);
                     const IrrepTable irreps = load_irreps(g, irreps_);
                     const auto theta = parse_signal_csv(read_text_file(signal_));
                     const auto f = gft(std::span<const double>(theta), irreps);
                     emit(fourier_to_csv(f, irreps), s);
                     s.add("irreps", irreps.size());
                     s.add("invertible", fourier_blocks_invertible(f));
                     return kExitOk;
                   }),
           true);

    auto* bis = command(spectral, "bispectrum", "bispectral coefficients of a signal", [this](Summary& s) {
      const GroupPtr g = load_group(group_);
      const SpectralBasis basis(load_irreps(g, irreps_));
      const auto theta = parse_signal_csv(read_text_file(signal_));
      const auto f = gft(std::span<const double>(theta), basis.irreps());
      std::vector<IrrepPair> pairs;
      if (planned_) {
        const RecoveryPlan plan = recovery_plan(basis.irreps(), basis.kronecker());
        if (!plan.feasible) throw Error(ErrorKind::InfeasiblePlan, "no recovery plan for " + g->name());
        pairs = plan.pairs;
      }
      const Bispectrum beta = bispectrum(f, basis, pairs);
      emit(bispectrum_to_csv(beta), s);
      s.add("pairs", beta.size());
      s.add("commutative", g->commutative());
      return kExitOk;
    });
    common(bis, true);
    bis->add_flag("--plan", planned_, "only the coefficients of the recovery plan");

    common(command(spectral, "kron-table", "Kronecker multiplicity table",
                   [this](Summary& s) {
                     const GroupPtr g = load_group(group_);
                     const IrrepTable irreps = load_irreps(g, irreps_);
                     emit(kronecker_table_to_csv(kronecker_table(irreps), irreps), s);
                     s.add("irreps", irreps.size());
                     return kExitOk;
                   }),
           false);

    common(command(spectral, "plan", "which bispectral coefficients recover a signal",
                   [this](Summary& s) {
                     const GroupPtr g = load_group(group_);
                     const IrrepTable irreps = load_irreps(g, irreps_);
                     const RecoveryPlan plan = recovery_plan(irreps, kronecker_table(irreps));
                     std::ostringstream os;
                     os << "# v1\nstep,i,j\n";
                     for (int p = 0; p < plan.length(); ++p)
                       os << p << ',' << plan.pairs[p].first << ',' << plan.pairs[p].second << '\n';
                     emit(os.str(), s);
                     s.add("group", g->name());
                     s.add("feasible", plan.feasible);
                     s.add("length", plan.length());
                     s.add("full", irreps.size() * irreps.size());
                     s.add("anchors", plan.anchors.size());
                     if (!plan.feasible) {
                       std::string missing;
                       for (int u : plan.unrecovered) missing += (missing.empty() ? "" : ",") + irreps[u].name;
                       s.add("unrecovered", missing);
                       return kExitInfeasible;
                     }
                     return kExitOk;
                   }),
           false);

    auto* recover = command(spectral, "recover", "rebuild a signal from its bispectrum", [this](Summary& s) {
      const GroupPtr g = load_group(group_);
      const SpectralBasis basis(load_irreps(g, irreps_));
      const RecoveryPlan plan = recovery_plan(basis.irreps(), basis.kronecker());
      if (!plan.feasible) throw Error(ErrorKind::InfeasiblePlan, "no recovery plan for " + g->name());
      if (signal_.empty() == bispectrum_.empty())
        throw Error(ErrorKind::BadFlag, "give exactly one of --signal and --bispectrum");
      Bispectrum beta;
      if (!bispectrum_.empty()) {
        beta = bispectrum_from_csv(read_text_file(bispectrum_));
      } else {
        const auto theta = parse_signal_csv(read_text_file(signal_));
        beta = bispectrum(gft(std::span<const double>(theta), basis.irreps()), basis, plan.pairs);
      }
      RecoveryOptions options;
      options.seed = seed_;
      const RecoveryResult r = recover_signal(beta, plan, basis, options);
      Bispectrum planned;
      for (const auto& p : plan.pairs) planned[p] = beta.at(p);
      const Bispectrum again = bispectrum(gft(std::span<const double>(r.signal), basis.irreps()), basis, plan.pairs);
      emit(signal_to_csv(r.signal), s);
      s.add("restarts", r.restarts);
      s.add("residual", r.residual);
      s.add("bispectrum_rel_diff", bispectrum_relative_difference(planned, again));
      return kExitOk;
    });
    recover->add_option("--group", group_, "built-in group name or Cayley-table file")->required();
    recover->add_option("--irreps", irreps_, "irrep JSON (built-in table when omitted)");
    recover->add_option("--signal", signal_, "signal CSV; its planned bispectrum is the input");
    recover->add_option("--bispectrum", bispectrum_, "bispectrum CSV as written by spectral bispectrum");
    recover->add_option("--seed", seed_, "seed for gauge restarts");
    add_out(recover);
  }

  void build_completeness(CLI::App& app) {
    auto* comp = app.add_subcommand("completeness", "orbit separation checks");
    comp->require_subcommand(1);
    auto* scan = command(comp, "scan", "exhaustive TC collision scan", [this](Summary& s) {
      const GroupPtr g = load_group(group_);
      const CollisionReport r =
          completeness_scan(g, parse_values(values_), parse_scan_filter(filter_), threads_, witnesses_);
      emit(collision_report_to_csv(r), s);
      s.add("group", r.group);
      s.add("signals", r.signals);
      s.add("fingerprints", r.fingerprints);
      s.add("cross_orbit", r.cross_orbit_pairs);
      s.add("cross_orbit_both_singular", r.cross_orbit_both_singular);
      return kExitOk;
    });
    scan->add_option("--group", group_, "built-in group name or Cayley-table file")->required();
    scan->add_option("--values", values_, "value set, lo..hi or a comma list")->required();
    scan->add_option("--filter", filter_, "all or nonzero-fourier");
    scan->add_option("--threads", threads_, "worker threads");
    scan->add_option("--witnesses", witnesses_, "cross-orbit pairs to list");
    add_out(scan);

    auto* metamer = command(comp, "metamer", "search for inputs matching a target representation", [this](Summary& s) {
      const Model model = model_from_json(parse_json(read_text_file(model_path_), model_path_));
      const auto& spec = model.action().group().spec();
      if (model.action().shape().kind == DomainKind::Group)
        throw Error(ErrorKind::UnsupportedGroup, "metamer targets come from a grid dataset");
      data_.group = spec->name();
      data_.synth.grid = model.action().shape().side;
      data_.synth.n_classes = model.n_classes();
      const Dataset data = data_.load();
      if (targets_ < 1 || targets_ > static_cast<int>(data.test.size()))
        throw Error(ErrorKind::BadFlag, "--targets must lie in 1.." + std::to_string(data.test.size()));
      metamer_.seed = seed_;
      std::vector<MetamerReport> reports;
      int converged = 0, metamers = 0;
      for (int t = 0; t < targets_; ++t) {
        reports.push_back(metamer_search(model, data.test.inputs[static_cast<std::size_t>(t)], t, metamer_, threads_));
        converged += reports.back().converged();
        metamers += reports.back().metamers();
      }
      emit(metamer_reports_to_csv(reports), s);
      s.add("variant", variant_name(model.variant()));
      s.add("targets", targets_);
      s.add("restarts", metamer_.restarts);
      s.add("converged", converged);
      s.add("metamers", metamers);
      return kExitOk;
    });
    metamer->add_option("--model", model_path_, "checkpoint JSON")->required();
    metamer->add_option("--targets", targets_, "first k test inputs are the targets");
    metamer->add_option("--restarts", metamer_.restarts, "random starts per target");
    metamer->add_option("--steps", metamer_.steps, "maximum optimisation steps");
    metamer->add_option("--lr", metamer_.lr, "initial learning rate");
    metamer->add_option("--min-lr", metamer_.min_lr, "plateau floor");
    metamer->add_option("--seed", seed_, "seed for the random starts");
    metamer->add_option("--threads", threads_, "worker threads");
    metamer->add_option("--data-seed", data_.synth.seed, "seed of the synthetic dataset holding the targets");
    metamer->add_option("--per-class", data_.synth.n_per_class, "synthetic train+val samples per class");
    metamer->add_option("--test-per-class", data_.synth.n_test_per_class, "synthetic test samples per class");
    metamer->add_option("--noise", data_.synth.noise, "Gaussian noise std");
    metamer->add_option("--jitter", data_.synth.jitter, "pixel displacement probability");
    add_out(metamer);
  }

  void build_train(CLI::App& app) {
    auto* train = app.add_subcommand("train", "Max vs TC classifiers");
    train->require_subcommand(1);
    auto* run = command(train, "run", "train one model", [this](Summary& s) {
      const Dataset data = data_.load();
      const PermutationAction action = dataset_action(data);
      const Variant variant = parse_variant(variant_);
      std::array<int, 3> hidden = hidden_widths(hidden_);
      if (match_params_ && variant == Variant::Max)
        hidden[0] = matched_max_width(action, channels_, data.n_classes, hidden);
      Model model(action, variant, channels_, data.n_classes, hidden, seed_);
      TrainConfig config = train_.config;
      config.seed = seed_;
      const TrainResult r = train_model(model, data, config);
      if (!log_path_.empty()) {
        write_text_file(log_path_, training_log_to_csv(r.log));
        s.add("log", log_path_);
      }
      if (out_path_.empty() && log_path_.empty())
        out_ << training_log_to_csv(r.log);
      else if (!out_path_.empty())
        emit(model_to_json(model).dump(1) + "\n", s);
      s.add("variant", variant_name(variant));
      s.add("parameters", model.parameter_count());
      s.add("test_accuracy", r.test.accuracy);
      s.add("test_loss", r.test.loss);
      return kExitOk;
    });
    data_.add(run);
    train_.add(run);
    run->add_option("--variant", variant_, "max or tc");
    run->add_option("--channels", channels_, "G-convolution channels");
    run->add_option("--hidden", hidden_, "three MLP widths")->delimiter(',');
    run->add_flag("--match-params", match_params_, "size the max variant's first layer to the tc parameter count");
    run->add_option("--seed", seed_, "initialisation and shuffling seed");
    run->add_option("--log", log_path_, "training log CSV");
    run->add_option("--out", out_path_, "checkpoint JSON");

    auto* compare = command(train, "compare", "parameter-matched Max vs TC over several seeds", [this](Summary& s) {
      const Dataset data = data_.load();
      ComparisonOptions options;
      options.config = train_.config;
      options.channels = channels_;
      options.hidden = hidden_widths(hidden_);
      options.seeds.assign(seeds_.begin(), seeds_.end());
      options.threads = threads_;
      const ComparisonReport r = run_comparison(data, options);
      emit(comparison_to_csv(r), s);
      s.add("max_mean", r.mean(Variant::Max));
      s.add("tc_mean", r.mean(Variant::Tc));
      s.add("max_parameters", r.max_parameters);
      s.add("tc_parameters", r.tc_parameters);
      s.add("parameter_gap", r.parameter_gap());
      return kExitOk;
    });
    data_.add(compare);
    train_.add(compare);
    compare->add_option("--channels", channels_, "G-convolution channels");
    compare->add_option("--hidden", hidden_, "three MLP widths of the tc variant")->delimiter(',');
    compare->add_option("--seeds", seeds_, "comma-separated seeds")->delimiter(',');
    compare->add_option("--threads", threads_, "worker threads");
    add_out(compare);

    auto* grad = command(train, "gradcheck", "analytic vs finite-difference gradients", [this](Summary& s) {
      const auto rows = random_gradient_checks(parse_group_spec(group_), parse_variant(variant_), configs_, seed_);
      emit(gradient_checks_to_csv(rows), s);
      double worst = 0.0;
      for (const auto& r : rows) worst = std::max(worst, r.relative_error);
      s.add("configs", configs_);
      s.add("max_relative_error", worst);
      s.add("pass", worst <= 1e-4);
      return worst <= 1e-4 ? kExitOk : kExitValidation;
    });
    grad->add_option("--group", group_, "built-in group name")->required();
    grad->add_option("--variant", variant_, "max or tc");
    grad->add_option("--configs", configs_, "random configurations");
    grad->add_option("--seed", seed_, "seed");
    add_out(grad);
  }

  std::ostream& out_;
  std::ostream& err_;
  std::vector<std::pair<CLI::App*, Handler>> handlers_;
  std::string command_;

  std::string out_path_, kind_, table_, group_, signal_, filters_, irreps_, bispectrum_, values_ = "-2..2",
                                                                                         filter_ = "all";
  std::string model_path_, log_path_, variant_ = "tc";
  int grid_ = 0, cube_ = 0, threads_ = 1, targets_ = 10, channels_ = 16, configs_ = 20;
  std::size_t witnesses_ = 16;
  std::uint64_t seed_ = 0;
  bool reduced_ = false, planned_ = false, max_pool_ = false, match_params_ = false;
  std::vector<int> hidden_{64, 64, 64};
  std::vector<std::uint64_t> seeds_{0, 1, 2, 3};
  DataFlags data_;
  TrainFlags train_;
  MetamerOptions metamer_ = desk_metamer_options();
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return Cli(out, err).run(argc, argv);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
}

}  // namespace gtc

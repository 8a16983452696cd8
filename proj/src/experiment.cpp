#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "grouptc/io.hpp"
#include "grouptc/train.hpp"

namespace gtc {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string training_log_to_csv(const std::vector<LogRow>& rows) {
  std::ostringstream os;
  os << "# v1\nepoch,split,loss,accuracy,lr\n";
  for (const auto& r : rows)
    os << r.epoch << ',' << r.split << ',' << format_number(r.loss) << ',' << format_number(r.accuracy) << ','
       << format_number(r.lr) << '\n';
  return os.str();
}

EvalResult evaluate(const Model& model, const Split& split, int batch_size) {
  EvalResult out;
  if (split.size() == 0) return out;
  double loss = 0.0;
  int correct = 0;
  for (std::size_t start = 0; start < split.size(); start += static_cast<std::size_t>(batch_size)) {
    std::vector<std::size_t> rows;
    std::vector<int> labels;
    for (std::size_t i = start; i < std::min(split.size(), start + batch_size); ++i) {
      rows.push_back(i);
      labels.push_back(split.labels[i]);
    }
    const auto cache = forward(model, split.matrix(rows), Mode::Eval);
    int hits = 0;
    loss += cross_entropy(cache.logits, labels, nullptr, &hits) * static_cast<double>(rows.size());
    correct += hits;
  }
  out.loss = loss / static_cast<double>(split.size());
  out.accuracy = static_cast<double>(correct) / static_cast<double>(split.size());
  return out;
}

TrainResult train_model(Model& model, const Dataset& data, const TrainConfig& config) {
  config.validate();
  if (data.train.size() < 2) throw Error(ErrorKind::ShapeMismatch, "training split needs at least 2 samples");
  std::mt19937_64 rng(config.seed);
  std::vector<Tensor*> tensors;
  std::vector<std::size_t> sizes;
  for (auto& p : model.parameters()) {
    tensors.push_back(p.tensor);
    sizes.push_back(p.tensor->size());
  }
  Adam adam(sizes, config);
  PlateauScheduler scheduler(config.lr, config.plateau_factor, config.plateau_patience, config.plateau_threshold,
                             config.min_lr);
  double lr = config.lr;

  TrainResult result;
  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    int correct = 0, seen = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      if (end - start < 2) continue;  // batch statistics need two samples
      std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                    order.begin() + static_cast<std::ptrdiff_t>(end));
      std::vector<int> labels;
      for (auto r : rows) labels.push_back(data.train.labels[r]);
      ForwardCache cache;
      const auto step = loss_and_gradients(model, data.train.matrix(rows), labels, Mode::Train, &cache);
      update_running_stats(model, cache);
      adam.step(tensors, step.grads.params, lr);
      loss_sum += step.loss * static_cast<double>(rows.size());
      correct += step.correct;
      seen += static_cast<int>(rows.size());
    }
    result.log.push_back(
        {epoch, "train", loss_sum / std::max(seen, 1), static_cast<double>(correct) / std::max(seen, 1), lr});
    const EvalResult val = evaluate(model, data.val.size() ? data.val : data.train);
    result.log.push_back({epoch, "val", val.loss, val.accuracy, lr});
    lr = scheduler.step(val.loss);
  }
  result.test = evaluate(model, data.test.size() ? data.test : data.val);
  result.log.push_back({config.epochs, "test", result.test.loss, result.test.accuracy, lr});
  return result;
}

double ComparisonReport::mean(Variant v) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : runs)
    if (r.variant == v) {
      sum += r.test_accuracy;
      ++n;
    }
  return n ? sum / n : 0.0;
}

double ComparisonReport::stddev(Variant v) const {
  const double mu = mean(v);
  double sum = 0.0;
  int n = 0;
  for (const auto& r : runs)
    if (r.variant == v) {
      sum += (r.test_accuracy - mu) * (r.test_accuracy - mu);
      ++n;
    }
  return n > 1 ? std::sqrt(sum / (n - 1)) : 0.0;
}

double ComparisonReport::parameter_gap() const {
  if (tc_parameters == 0) return 0.0;
  const double a = static_cast<double>(max_parameters), b = static_cast<double>(tc_parameters);
  return std::abs(a - b) / b;
}

ComparisonReport run_comparison(const Dataset& data, const ComparisonOptions& options) {
  const PermutationAction action = dataset_action(data);
  ComparisonReport report;
  report.max_first_width = matched_max_width(action, options.channels, data.n_classes, options.hidden);
  const std::array<int, 3> max_hidden{report.max_first_width, options.hidden[1], options.hidden[2]};

  const int jobs = static_cast<int>(options.seeds.size()) * 2;
  report.runs.resize(static_cast<std::size_t>(jobs));
  parallel_for(jobs, options.threads, [&](int job) {
    const std::uint64_t seed = options.seeds[static_cast<std::size_t>(job / 2)];
    const Variant variant = job % 2 == 0 ? Variant::Max : Variant::Tc;
    Model model(action, variant, options.channels, data.n_classes,
                variant == Variant::Max ? max_hidden : options.hidden, seed);
    TrainConfig config = options.config;
    config.seed = seed;
    const auto result = train_model(model, data, config);
    report.runs[static_cast<std::size_t>(job)] = {variant, seed, result.test.accuracy, model.parameter_count()};
  });
  for (const auto& r : report.runs)
    (r.variant == Variant::Max ? report.max_parameters : report.tc_parameters) = r.parameters;
  return report;
}

std::string comparison_to_csv(const ComparisonReport& report) {
  std::ostringstream os;
  os << "# v1\nvariant,seed,test_accuracy,parameters\n";
  for (const auto& r : report.runs)
    os << variant_name(r.variant) << ',' << r.seed << ',' << format_number(r.test_accuracy) << ',' << r.parameters
       << '\n';
  for (Variant v : {Variant::Max, Variant::Tc})
    os << variant_name(v) << ",mean," << format_number(report.mean(v)) << ','
       << (v == Variant::Max ? report.max_parameters : report.tc_parameters) << '\n'
       << variant_name(v) << ",std," << format_number(report.stddev(v)) << ','
       << (v == Variant::Max ? report.max_parameters : report.tc_parameters) << '\n';
  return os.str();
}

namespace {

std::string domain_kind_name(DomainKind k) {
  switch (k) {
    case DomainKind::SquareGrid: return "square";
    case DomainKind::CubeGrid: return "cube";
    case DomainKind::Group: return "group";
  }
  return "group";
}

nlohmann::json tensor_to_json(const Tensor& t) {
  nlohmann::json values = nlohmann::json::array();
  for (double v : t.data) values.push_back(format_number(v));
  return {{"shape", t.shape}, {"data", values}};
}

void tensor_from_json(const nlohmann::json& j, Tensor& t, const std::string& name) {
  const auto shape = j.at("shape").get<std::vector<int>>();
  if (shape != t.shape || j.at("data").size() != t.size())
    throw Error(ErrorKind::ShapeMismatch, "checkpoint tensor " + name + " has the wrong shape");
  for (std::size_t i = 0; i < t.size(); ++i) t.data[i] = parse_number(j.at("data").at(i).get<std::string>());
}

}  // namespace

nlohmann::json model_to_json(const Model& model) {
  const auto& shape = model.action().shape();
  nlohmann::json params = nlohmann::json::object(), buffers = nlohmann::json::object();
  for (const auto& p : model.parameters()) params[p.name] = tensor_to_json(*p.tensor);
  for (const auto& b : model.buffers()) buffers[b.name] = tensor_to_json(*b.tensor);
  const auto& spec = model.action().group().spec();
  if (!spec) throw Error(ErrorKind::UnsupportedGroup, "checkpoints need a built-in group");
  return {{"format_version", 1},
          {"variant", variant_name(model.variant())},
          {"group", spec->name()},
          {"domain", {{"kind", domain_kind_name(shape.kind)}, {"side", shape.side}}},
          {"channels", model.channels()},
          {"n_classes", model.n_classes()},
          {"hidden", model.hidden()},
          {"parameters", params},
          {"buffers", buffers}};
}

Model model_from_json(const nlohmann::json& j) {
  try {
    Dataset probe;
    probe.group = parse_group_spec(j.at("group").get<std::string>());
    const auto kind = j.at("domain").at("kind").get<std::string>();
    probe.shape.side = j.at("domain").at("side").get<int>();
    if (kind == "square")
      probe.shape.kind = DomainKind::SquareGrid;
    else if (kind == "cube")
      probe.shape.kind = DomainKind::CubeGrid;
    else if (kind == "group")
      probe.shape.kind = DomainKind::Group;
    else
      throw Error(ErrorKind::ParseError, "unknown domain kind '" + kind + "'");
    Model model(dataset_action(probe), parse_variant(j.at("variant").get<std::string>()), j.at("channels").get<int>(),
                j.at("n_classes").get<int>(), j.at("hidden").get<std::array<int, 3>>(), 0);
    for (auto& p : model.parameters()) tensor_from_json(j.at("parameters").at(p.name), *p.tensor, p.name);
    for (auto& b : model.buffers()) tensor_from_json(j.at("buffers").at(b.name), *b.tensor, b.name);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad checkpoint: ") + e.what());
  }
}

}  // namespace gtc

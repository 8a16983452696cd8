#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "grouptc/io.hpp"
#include "grouptc/train.hpp"

namespace gtc {

std::string variant_name(Variant v) { return v == Variant::Max ? "max" : "tc"; }

Variant parse_variant(const std::string& text) {
  if (text == "max") return Variant::Max;
  if (text == "tc") return Variant::Tc;
  throw Error(ErrorKind::BadFlag, "variant must be max or tc, got '" + text + "'");
}

Tensor::Tensor(std::vector<int> s, double fill) : shape(std::move(s)) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  data.assign(n, fill);
}

namespace {

void fill_uniform(Tensor& t, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : t.data) v = dist(rng);
}

}  // namespace

Model::Model(PermutationAction action, Variant variant, int channels, int n_classes, std::array<int, 3> hidden,
             std::uint64_t seed)
    : action_(std::move(action)),
      classes_(symmetry_classes(action_.group())),
      variant_(variant),
      channels_(channels),
      n_classes_(n_classes),
      hidden_(hidden) {
  if (channels < 1 || n_classes < 1 || std::any_of(hidden.begin(), hidden.end(), [](int h) { return h < 1; }))
    throw Error(ErrorKind::ShapeMismatch, "channels, classes and hidden widths must be positive");
  std::mt19937_64 rng(seed);
  const int m = action_.domain_size();
  conv = Tensor({channels, m});
  fill_uniform(conv, 1.0 / std::sqrt(static_cast<double>(m)), rng);
  conv_gamma = Tensor({channels}, 1.0);
  conv_beta = Tensor({channels});
  conv_mean = Tensor({channels});
  conv_var = Tensor({channels}, 1.0);
  const int f = features();
  feat_mean = Tensor({variant == Variant::Tc ? f : 0});
  feat_var = Tensor({variant == Variant::Tc ? f : 0}, 1.0);

  const std::array<int, 5> dims{f, hidden[0], hidden[1], hidden[2], n_classes};
  for (int l = 0; l < 4; ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    weight[l] = Tensor({dims[l + 1], dims[l]});
    bias[l] = Tensor({dims[l + 1]});
    fill_uniform(weight[l], bound, rng);
    fill_uniform(bias[l], bound, rng);
  }
  for (int l = 0; l < 3; ++l) {
    bn_gamma[l] = Tensor({dims[l + 1]}, 1.0);
    bn_beta[l] = Tensor({dims[l + 1]});
    bn_mean[l] = Tensor({dims[l + 1]});
    bn_var[l] = Tensor({dims[l + 1]}, 1.0);
  }
}

int Model::features() const { return variant_ == Variant::Max ? channels_ : channels_ * classes_.count(); }

std::vector<Model::Named> Model::parameters() {
  std::vector<Named> out{{"conv", &conv}, {"conv_gamma", &conv_gamma}, {"conv_beta", &conv_beta}};
  for (int l = 0; l < 3; ++l) {
    const std::string s = std::to_string(l);
    out.push_back({"linear" + s + ".weight", &weight[l]});
    out.push_back({"linear" + s + ".bias", &bias[l]});
    out.push_back({"bn" + s + ".gamma", &bn_gamma[l]});
    out.push_back({"bn" + s + ".beta", &bn_beta[l]});
  }
  out.push_back({"linear3.weight", &weight[3]});
  out.push_back({"linear3.bias", &bias[3]});
  return out;
}

std::vector<Model::ConstNamed> Model::parameters() const {
  std::vector<ConstNamed> out;
  for (const auto& p : const_cast<Model*>(this)->parameters()) out.push_back({p.name, p.tensor});
  return out;
}

std::vector<Model::Named> Model::buffers() {
  std::vector<Named> out{{"conv_mean", &conv_mean}, {"conv_var", &conv_var}};
  if (variant_ == Variant::Tc) {
    out.push_back({"feat_mean", &feat_mean});
    out.push_back({"feat_var", &feat_var});
  }
  for (int l = 0; l < 3; ++l) {
    out.push_back({"bn" + std::to_string(l) + ".mean", &bn_mean[l]});
    out.push_back({"bn" + std::to_string(l) + ".var", &bn_var[l]});
  }
  return out;
}

std::vector<Model::ConstNamed> Model::buffers() const {
  std::vector<ConstNamed> out;
  for (const auto& p : const_cast<Model*>(this)->buffers()) out.push_back({p.name, p.tensor});
  return out;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.tensor->size();
  return n;
}

std::size_t parameter_count(Variant variant, int domain_size, int /*group_order*/, int tc_classes, int channels,
                            int n_classes, const std::array<int, 3>& hidden) {
  const std::size_t k = static_cast<std::size_t>(channels);
  std::size_t n = k * static_cast<std::size_t>(domain_size) + 2 * k;
  const std::size_t f = variant == Variant::Max ? k : k * static_cast<std::size_t>(tc_classes);
  const std::array<std::size_t, 4> dims{f, static_cast<std::size_t>(hidden[0]), static_cast<std::size_t>(hidden[1]),
                                        static_cast<std::size_t>(hidden[2])};
  for (int l = 0; l < 3; ++l) n += dims[l] * dims[l + 1] + 3 * dims[l + 1];
  n += dims[3] * static_cast<std::size_t>(n_classes) + static_cast<std::size_t>(n_classes);
  return n;
}

int matched_max_width(const PermutationAction& action, int channels, int n_classes, const std::array<int, 3>& hidden) {
  const int classes = symmetry_classes(action.group()).count();
  const int order = action.group().order();
  const auto target = static_cast<double>(
      parameter_count(Variant::Tc, action.domain_size(), order, classes, channels, n_classes, hidden));
  int best = 1;
  double best_gap = INFINITY;
  for (int w = 1; w <= 1 << 20; ++w) {
    const auto count = static_cast<double>(parameter_count(Variant::Max, action.domain_size(), order, classes, channels,
                                                           n_classes, {w, hidden[1], hidden[2]}));
    const double gap = std::abs(count - target);
    if (gap < best_gap) {
      best_gap = gap;
      best = w;
    }
    if (count > target) break;
  }
  return best;
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> as_matrix(const Tensor& t) { return {t.data.data(), t.shape[0], t.shape[1]}; }
Eigen::Map<const Eigen::RowVectorXd> as_row(const Tensor& t) {
  return {t.data.data(), static_cast<Eigen::Index>(t.data.size())};
}

// Column-wise batch norm of x (B x F). Train mode uses batch statistics.
void batch_norm_columns(const Matrix& x, Mode mode, const std::vector<double>& running_mean,
                        const std::vector<double>& running_var, Matrix& x_hat, std::vector<double>& mean,
                        std::vector<double>& var) {
  const auto cols = x.cols();
  mean.assign(static_cast<std::size_t>(cols), 0.0);
  var.assign(static_cast<std::size_t>(cols), 0.0);
  x_hat.resize(x.rows(), cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (mode == Mode::Train) {
      mean[c] = x.col(c).mean();
      var[c] = (x.col(c).array() - mean[c]).square().mean();
    } else {
      mean[c] = running_mean[c];
      var[c] = running_var[c];
    }
    x_hat.col(c) = (x.col(c).array() - mean[c]) / std::sqrt(var[c] + kBatchNormEps);
  }
}

Matrix batch_norm_columns_backward(const Matrix& dy, const Matrix& x_hat, const std::vector<double>& var, Mode mode) {
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index c = 0; c < dy.cols(); ++c) {
    const double inv_std = 1.0 / std::sqrt(var[c] + kBatchNormEps);
    if (mode == Mode::Train) {
      const double mean_dy = dy.col(c).mean();
      const double mean_dy_xhat = dy.col(c).dot(x_hat.col(c)) / static_cast<double>(dy.rows());
      dx.col(c) = inv_std * (dy.col(c).array() - mean_dy - x_hat.col(c).array() * mean_dy_xhat);
    } else {
      dx.col(c) = inv_std * dy.col(c);
    }
  }
  return dx;
}

}  // namespace

ForwardCache forward(const Model& model, const Matrix& inputs, Mode mode, bool through_mlp) {
  const PermutationAction& action = model.action();
  const FiniteGroup& group = action.group();
  const int b_count = static_cast<int>(inputs.rows());
  const int k_count = model.channels();
  const int n = group.order();
  const int m = action.domain_size();
  if (inputs.cols() != m)
    throw Error(ErrorKind::ShapeMismatch,
                "input width " + std::to_string(inputs.cols()) + " != domain size " + std::to_string(m));
  if (b_count < 1) throw Error(ErrorKind::ShapeMismatch, "empty batch");

  ForwardCache c;
  c.mode = mode;
  c.batch = b_count;
  c.inputs = inputs;
  auto at = [&](int b, int k, int g) { return (static_cast<std::size_t>(b) * k_count + k) * n + g; };

  // Theta_k(g) = sum_v phi_k(v) f(p_g(v)).
  const auto phi = as_matrix(model.conv);
  c.conv_out.assign(static_cast<std::size_t>(b_count) * k_count * n, 0.0);
  Matrix xg(b_count, m);
  for (int g = 0; g < n; ++g) {
    const auto& p = action.perm(g);
    for (int v = 0; v < m; ++v) xg.col(v) = inputs.col(p[v]);
    const Matrix out = xg * phi.transpose();
    for (int b = 0; b < b_count; ++b)
      for (int k = 0; k < k_count; ++k) c.conv_out[at(b, k, g)] = out(b, k);
  }

  // Batch norm per channel over batch and group axes.
  c.conv_mean.assign(static_cast<std::size_t>(k_count), 0.0);
  c.conv_var.assign(static_cast<std::size_t>(k_count), 0.0);
  c.conv_norm.resize(c.conv_out.size());
  c.conv_act.resize(c.conv_out.size());
  const double count = static_cast<double>(b_count) * n;
  for (int k = 0; k < k_count; ++k) {
    double mean = model.conv_mean.data[k], var = model.conv_var.data[k];
    if (mode == Mode::Train) {
      mean = 0.0;
      for (int b = 0; b < b_count; ++b)
        for (int g = 0; g < n; ++g) mean += c.conv_out[at(b, k, g)];
      mean /= count;
      var = 0.0;
      for (int b = 0; b < b_count; ++b)
        for (int g = 0; g < n; ++g) var += (c.conv_out[at(b, k, g)] - mean) * (c.conv_out[at(b, k, g)] - mean);
      var /= count;
    }
    c.conv_mean[k] = mean;
    c.conv_var[k] = var;
    const double inv_std = 1.0 / std::sqrt(var + kBatchNormEps);
    for (int b = 0; b < b_count; ++b)
      for (int g = 0; g < n; ++g) {
        const auto i = at(b, k, g);
        c.conv_norm[i] = (c.conv_out[i] - mean) * inv_std;
        double y = model.conv_gamma.data[k] * c.conv_norm[i] + model.conv_beta.data[k];
        if (model.variant() == Variant::Max) y = std::max(y, 0.0);
        c.conv_act[i] = y;
      }
  }

  const int f = model.features();
  c.pooled.resize(b_count, f);
  if (model.variant() == Variant::Max) {
    c.argmax.assign(static_cast<std::size_t>(b_count) * k_count, 0);
    for (int b = 0; b < b_count; ++b)
      for (int k = 0; k < k_count; ++k) {
        int best = 0;
        for (int g = 1; g < n; ++g)
          if (c.conv_act[at(b, k, g)] > c.conv_act[at(b, k, best)]) best = g;
        c.argmax[static_cast<std::size_t>(b) * k_count + k] = best;
        c.pooled(b, k) = c.conv_act[at(b, k, best)];
      }
    c.representation = c.pooled;
  } else {
    const int classes = model.classes().count();
    for (int b = 0; b < b_count; ++b)
      for (int k = 0; k < k_count; ++k) {
        const std::span<const double> theta(c.conv_act.data() + at(b, k, 0), static_cast<std::size_t>(n));
        const auto t = triple_correlation_reduced<double>(group, model.classes(), theta);
        for (int r = 0; r < classes; ++r) c.pooled(b, k * classes + r) = t[r];
      }
    batch_norm_columns(c.pooled, mode, model.feat_mean.data, model.feat_var.data, c.representation, c.feat_mean,
                       c.feat_var);
  }

  if (!through_mlp) return c;
  const Matrix* h = &c.representation;
  for (int l = 0; l < 3; ++l) {
    c.pre[l] = (*h) * as_matrix(model.weight[l]).transpose();
    c.pre[l].rowwise() += as_row(model.bias[l]);
    batch_norm_columns(c.pre[l], mode, model.bn_mean[l].data, model.bn_var[l].data, c.norm[l], c.bn_mean[l],
                       c.bn_var[l]);
    Matrix z = c.norm[l];
    z.array().rowwise() *= as_row(model.bn_gamma[l]).array();
    z.rowwise() += as_row(model.bn_beta[l]);
    c.post[l] = z.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
    h = &c.post[l];
  }
  c.logits = (*h) * as_matrix(model.weight[3]).transpose();
  c.logits.rowwise() += as_row(model.bias[3]);
  return c;
}

void update_running_stats(Model& model, const ForwardCache& cache) {
  if (cache.mode != Mode::Train) return;
  const double mom = kBatchNormMomentum;
  auto blend = [mom](Tensor& running_mean, Tensor& running_var, const std::vector<double>& mean,
                     const std::vector<double>& var, double count) {
    const double unbias = count > 1 ? count / (count - 1) : 1.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      running_mean.data[i] = (1 - mom) * running_mean.data[i] + mom * mean[i];
      running_var.data[i] = (1 - mom) * running_var.data[i] + mom * var[i] * unbias;
    }
  };
  const double n = model.action().group().order();
  blend(model.conv_mean, model.conv_var, cache.conv_mean, cache.conv_var, cache.batch * n);
  if (model.variant() == Variant::Tc)
    blend(model.feat_mean, model.feat_var, cache.feat_mean, cache.feat_var, cache.batch);
  for (int l = 0; l < 3; ++l) blend(model.bn_mean[l], model.bn_var[l], cache.bn_mean[l], cache.bn_var[l], cache.batch);
}

Gradients backward(const Model& model, const ForwardCache& c, const Matrix& dlogits, const Matrix* drepresentation) {
  const PermutationAction& action = model.action();
  const FiniteGroup& group = action.group();
  const int b_count = c.batch;
  const int k_count = model.channels();
  const int n = group.order();
  const int m = action.domain_size();
  auto at = [&](int b, int k, int g) { return (static_cast<std::size_t>(b) * k_count + k) * n + g; };

  Gradients grads;
  grads.params.resize(model.parameters().size());
  auto& gp = grads.params;
  // Index layout matches Model::parameters().
  auto linear_index = [](int l) { return l < 3 ? 3 + 4 * l : 15; };

  Matrix dh;
  if (dlogits.size() == 0) {
    dh = Matrix::Zero(b_count, model.features());
  } else {
    // Output layer.
    const Matrix& h3 = c.post[2];
    {
      const Matrix dw = dlogits.transpose() * h3;
      gp[linear_index(3)].assign(dw.size(), 0.0);
      Eigen::Map<RowMatrix>(gp[linear_index(3)].data(), dw.rows(), dw.cols()) = dw;
      const Eigen::RowVectorXd db = dlogits.colwise().sum();
      gp[linear_index(3) + 1].assign(db.data(), db.data() + db.size());
    }
    dh = dlogits * as_matrix(model.weight[3]);

    for (int l = 2; l >= 0; --l) {
      const int base = linear_index(l);
      // ELU': 1 for z > 0, exp(z) = post + 1 otherwise.
      Matrix dz = dh;
      for (Eigen::Index i = 0; i < dz.size(); ++i)
        if (!(c.post[l](i) > 0.0)) dz(i) *= c.post[l](i) + 1.0;
      const Eigen::RowVectorXd dgamma = (dz.array() * c.norm[l].array()).colwise().sum();
      const Eigen::RowVectorXd dbeta = dz.colwise().sum();
      gp[base + 2].assign(dgamma.data(), dgamma.data() + dgamma.size());
      gp[base + 3].assign(dbeta.data(), dbeta.data() + dbeta.size());
      Matrix dnorm = dz;
      dnorm.array().rowwise() *= as_row(model.bn_gamma[l]).array();
      const Matrix dpre = batch_norm_columns_backward(dnorm, c.norm[l], c.bn_var[l], c.mode);
      const Matrix& hin = l == 0 ? c.representation : c.post[l - 1];
      const Matrix dw = dpre.transpose() * hin;
      gp[base].assign(dw.size(), 0.0);
      Eigen::Map<RowMatrix>(gp[base].data(), dw.rows(), dw.cols()) = dw;
      const Eigen::RowVectorXd db = dpre.colwise().sum();
      gp[base + 1].assign(db.data(), db.data() + db.size());
      dh = dpre * as_matrix(model.weight[l]);
    }
  }
  if (drepresentation) dh += *drepresentation;

  std::vector<double> dact(c.conv_act.size(), 0.0);
  if (model.variant() == Variant::Max) {
    for (int b = 0; b < b_count; ++b)
      for (int k = 0; k < k_count; ++k) dact[at(b, k, c.argmax[static_cast<std::size_t>(b) * k_count + k])] += dh(b, k);
  } else {
    const Matrix dpooled = batch_norm_columns_backward(dh, c.representation, c.feat_var, c.mode);
    const int classes = model.classes().count();
    std::vector<double> w(static_cast<std::size_t>(classes));
    for (int b = 0; b < b_count; ++b)
      for (int k = 0; k < k_count; ++k) {
        for (int r = 0; r < classes; ++r) w[r] = dpooled(b, k * classes + r);
        const std::span<const double> theta(c.conv_act.data() + at(b, k, 0), static_cast<std::size_t>(n));
        const auto g = triple_correlation_reduced_backward(group, model.classes(), theta, w);
        for (int e = 0; e < n; ++e) dact[at(b, k, e)] = g[e];
      }
  }

  // ReLU (max variant), affine and batch norm over batch x group.
  std::vector<double> dconv(dact.size(), 0.0);
  gp[1].assign(static_cast<std::size_t>(k_count), 0.0);
  gp[2].assign(static_cast<std::size_t>(k_count), 0.0);
  const double count = static_cast<double>(b_count) * n;
  for (int k = 0; k < k_count; ++k) {
    const double gamma = model.conv_gamma.data[k];
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (int b = 0; b < b_count; ++b)
      for (int g = 0; g < n; ++g) {
        const auto i = at(b, k, g);
        double dy = dact[i];
        if (model.variant() == Variant::Max && !(c.conv_act[i] > 0.0)) dy = 0.0;
        dact[i] = dy;
        sum_dy += dy;
        sum_dy_xhat += dy * c.conv_norm[i];
      }
    gp[1][k] = sum_dy_xhat;
    gp[2][k] = sum_dy;
    const double inv_std = 1.0 / std::sqrt(c.conv_var[k] + kBatchNormEps);
    for (int b = 0; b < b_count; ++b)
      for (int g = 0; g < n; ++g) {
        const auto i = at(b, k, g);
        if (c.mode == Mode::Train)
          dconv[i] = gamma * inv_std * (dact[i] - sum_dy / count - c.conv_norm[i] * sum_dy_xhat / count);
        else
          dconv[i] = gamma * inv_std * dact[i];
      }
  }

  // Convolution.
  const auto phi = as_matrix(model.conv);
  Matrix dphi = Matrix::Zero(k_count, m);
  grads.inputs = Matrix::Zero(b_count, m);
  Matrix xg(b_count, m), dtheta(b_count, k_count);
  for (int g = 0; g < n; ++g) {
    const auto& p = action.perm(g);
    for (int v = 0; v < m; ++v) xg.col(v) = c.inputs.col(p[v]);
    for (int b = 0; b < b_count; ++b)
      for (int k = 0; k < k_count; ++k) dtheta(b, k) = dconv[at(b, k, g)];
    dphi.noalias() += dtheta.transpose() * xg;
    const Matrix dxg = dtheta * phi;
    for (int v = 0; v < m; ++v) grads.inputs.col(p[v]) += dxg.col(v);
  }
  gp[0].assign(static_cast<std::size_t>(k_count) * m, 0.0);
  Eigen::Map<RowMatrix>(gp[0].data(), k_count, m) = dphi;
  return grads;
}

double cross_entropy(const Matrix& logits, const std::vector<int>& labels, Matrix* dlogits, int* correct) {
  const auto b_count = logits.rows();
  if (static_cast<Eigen::Index>(labels.size()) != b_count)
    throw Error(ErrorKind::ShapeMismatch, "label count differs from batch size");
  double loss = 0.0;
  int hits = 0;
  if (dlogits) dlogits->resize(b_count, logits.cols());
  for (Eigen::Index b = 0; b < b_count; ++b) {
    const int y = labels[static_cast<std::size_t>(b)];
    if (y < 0 || y >= logits.cols()) throw Error(ErrorKind::ShapeMismatch, "label out of range");
    Eigen::Index arg = 0;
    const double top = logits.row(b).maxCoeff(&arg);
    if (arg == y) ++hits;
    const Eigen::RowVectorXd e = (logits.row(b).array() - top).exp();
    const double z = e.sum();
    loss += -(logits(b, y) - top - std::log(z));
    if (dlogits) {
      dlogits->row(b) = e / z;
      (*dlogits)(b, y) -= 1.0;
    }
  }
  if (dlogits) *dlogits /= static_cast<double>(b_count);
  if (correct) *correct = hits;
  return loss / static_cast<double>(b_count);
}

LossResult loss_and_gradients(const Model& model, const Matrix& inputs, const std::vector<int>& labels, Mode mode,
                              ForwardCache* cache_out) {
  ForwardCache cache = forward(model, inputs, mode);
  LossResult out;
  Matrix dlogits;
  out.loss = cross_entropy(cache.logits, labels, &dlogits, &out.correct);
  out.grads = backward(model, cache, dlogits);
  if (cache_out) *cache_out = std::move(cache);
  return out;
}

std::vector<GradCheckEntry> gradient_check(const Model& model, const Matrix& inputs, const std::vector<int>& labels,
                                           double step) {
  Model probe = model;
  Matrix x = inputs;
  const auto grads = loss_and_gradients(model, inputs, labels).grads;
  const auto& analytic = grads.params;
  auto loss_at = [&]() { return cross_entropy(forward(probe, x, Mode::Train).logits, labels, nullptr, nullptr); };
  std::vector<GradCheckEntry> out;
  auto params = probe.parameters();
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& data = params[t].tensor->data;
    Eigen::VectorXd numeric(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double saved = data[i];
      data[i] = saved + step;
      const double up = loss_at();
      data[i] = saved - step;
      const double down = loss_at();
      data[i] = saved;
      numeric(static_cast<Eigen::Index>(i)) = (up - down) / (2 * step);
    }
    const Eigen::Map<const Eigen::VectorXd> a(analytic[t].data(), static_cast<Eigen::Index>(analytic[t].size()));
    out.push_back({params[t].name, (a - numeric).norm() / std::max(numeric.norm(), kGradCheckFloor)});
  }
  Matrix numeric(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x(i);
    x(i) = saved + step;
    const double up = loss_at();
    x(i) = saved - step;
    const double down = loss_at();
    x(i) = saved;
    numeric(i) = (up - down) / (2 * step);
  }
  out.push_back({"input", (grads.inputs - numeric).norm() / std::max(numeric.norm(), kGradCheckFloor)});
  return out;
}

double tc_layer_gradient_check(const FiniteGroup& group, const SymmetryClasses& classes, std::span<const double> theta,
                               std::span<const double> weights, double step) {
  const auto analytic = triple_correlation_reduced_backward(group, classes, theta, weights);
  std::vector<double> x(theta.begin(), theta.end());
  auto value = [&]() {
    const auto t = triple_correlation_reduced<double>(group, classes, x);
    double s = 0.0;
    for (std::size_t r = 0; r < t.size(); ++r) s += weights[r] * t[r];
    return s;
  };
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double up = value();
    x[i] = saved - step;
    const double down = value();
    x[i] = saved;
    const double numeric = (up - down) / (2 * step);
    diff += (analytic[i] - numeric) * (analytic[i] - numeric);
    norm += numeric * numeric;
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), kGradCheckFloor);
}

namespace {

// Central differences are only meaningful away from the kinks of ReLU and max
// pooling and where no batch-norm column is nearly constant.
bool generic_point(const Model& model, const Matrix& inputs) {
  constexpr double margin = 1e-3;
  const ForwardCache c = forward(model, inputs, Mode::Train);
  const int k_count = model.channels();
  const int n = model.action().group().order();
  for (double v : c.conv_var)
    if (v < margin) return false;
  if (model.variant() == Variant::Max) {
    for (std::size_t i = 0; i < c.conv_norm.size(); ++i) {
      const auto k = (i / static_cast<std::size_t>(n)) % static_cast<std::size_t>(k_count);
      if (std::abs(model.conv_gamma.data[k] * c.conv_norm[i] + model.conv_beta.data[k]) < margin) return false;
    }
    for (int b = 0; b < c.batch; ++b)
      for (int k = 0; k < k_count; ++k) {
        const double top = c.pooled(b, k);
        if (!(top > margin)) return false;
        for (int g = 0; g < n; ++g) {
          const double v = c.conv_act[(static_cast<std::size_t>(b) * k_count + k) * n + g];
          if (g != c.argmax[static_cast<std::size_t>(b) * k_count + k] && top - v < margin) return false;
        }
      }
  }
  auto spread = [&](const Matrix& m) {
    for (Eigen::Index col = 0; col < m.cols(); ++col)
      if ((m.col(col).array() - m.col(col).mean()).square().mean() < margin) return false;
    return true;
  };
  if (!spread(c.pooled)) return false;
  for (int l = 0; l < 3; ++l)
    if (!spread(c.pre[l])) return false;
  return true;
}

}  // namespace

std::vector<GradCheckRow> random_gradient_checks(const GroupSpec& group, Variant variant, int configs,
                                                 std::uint64_t seed) {
  auto g = make_group_ptr(group);
  const bool cube = group.family == GroupFamily::Octahedral || group.family == GroupFamily::FullOctahedral;
  const PermutationAction action = cube ? cube_grid_action(g, 2) : square_grid_action(g, 3);
  const SymmetryClasses classes = symmetry_classes(*g);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> channels(1, 3), width(3, 6), classes_count(2, 4), batch(3, 6);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  struct Draw {
    Model model;
    Matrix inputs;
    std::vector<int> labels;
  };
  auto draw = [&]() {
    const int k = channels(rng), n_classes = classes_count(rng), b = batch(rng);
    const std::array<int, 3> hidden{width(rng), width(rng), width(rng)};
    Draw d{Model(action, variant, k, n_classes, hidden, rng()), Matrix(b, action.domain_size()), {}};
    // Move batch-norm affines off their initial values so every path is exercised.
    for (auto* t : {&d.model.conv_gamma, &d.model.conv_beta})
      for (auto& v : t->data) v += 0.5 * unit(rng);
    for (int l = 0; l < 3; ++l)
      for (auto* t : {&d.model.bn_gamma[l], &d.model.bn_beta[l]})
        for (auto& v : t->data) v += 0.5 * unit(rng);
    for (Eigen::Index i = 0; i < d.inputs.size(); ++i) d.inputs(i) = unit(rng);
    for (int i = 0; i < b; ++i) d.labels.push_back(std::uniform_int_distribution<int>(0, n_classes - 1)(rng));
    return d;
  };

  std::vector<GradCheckRow> out;
  for (int c = 0; c < configs; ++c) {
    std::optional<Draw> d;
    for (int attempt = 0; attempt < 1000 && !d; ++attempt) {
      Draw candidate = draw();
      if (generic_point(candidate.model, candidate.inputs)) d = std::move(candidate);
    }
    if (!d) throw Error(ErrorKind::ShapeMismatch, "no generic gradient-check configuration found");
    for (const auto& e : gradient_check(d->model, d->inputs, d->labels)) out.push_back({c, e.name, e.relative_error});
    if (variant == Variant::Tc) {
      std::vector<double> theta(static_cast<std::size_t>(g->order())), w(classes.representatives.size());
      for (auto& v : theta) v = unit(rng);
      for (auto& v : w) v = unit(rng);
      out.push_back({c, "tc_layer", tc_layer_gradient_check(*g, classes, theta, w)});
    }
  }
  return out;
}

std::string gradient_checks_to_csv(const std::vector<GradCheckRow>& rows) {
  std::ostringstream os;
  os << "# v1\nconfig,tensor,relative_error\n";
  for (const auto& r : rows) os << r.config << ',' << r.name << ',' << format_number(r.relative_error) << '\n';
  return os.str();
}

}  // namespace gtc

#include <cmath>
#include <limits>

#include "grouptc/train.hpp"

namespace gtc {

TrainConfig desk_train_config() {
  TrainConfig c;
  c.lr = 2e-3;
  c.min_lr = 2e-5;
  c.epochs = 30;
  return c;
}

void TrainConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw Error(ErrorKind::BadFlag, std::string(name) + " must be positive");
  };
  positive(lr, "lr");
  positive(eps, "eps");
  positive(plateau_factor, "plateau factor");
  positive(min_lr, "min lr");
  if (weight_decay < 0.0) throw Error(ErrorKind::BadFlag, "weight decay must be non-negative");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
    throw Error(ErrorKind::BadFlag, "betas must lie in (0, 1)");
  if (plateau_factor >= 1.0) throw Error(ErrorKind::BadFlag, "plateau factor must be below 1");
  if (plateau_patience < 0 || batch_size < 1 || epochs < 1)
    throw Error(ErrorKind::BadFlag, "patience, batch size and epochs must be positive");
}

Adam::Adam(const std::vector<std::size_t>& sizes, const TrainConfig& config) : config_(config) {
  for (auto s : sizes) {
    m_.emplace_back(s, 0.0);
    v_.emplace_back(s, 0.0);
  }
}

void Adam::step(const std::vector<Tensor*>& params, const std::vector<std::vector<double>>& grads, double lr) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw Error(ErrorKind::ShapeMismatch, "optimizer state does not match the parameter list");
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, t_);
  const double c2 = 1.0 - std::pow(b2, t_);
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& p = params[t]->data;
    const auto& g = grads[t];
    auto& m = m_[t];
    auto& v = v_[t];
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] -= lr * config_.weight_decay * p[i];
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.eps);
    }
  }
}

PlateauScheduler::PlateauScheduler(double lr, double factor, int patience, double threshold, double min_lr)
    : lr_(lr),
      factor_(factor),
      threshold_(threshold),
      min_lr_(min_lr),
      patience_(patience),
      best_(std::numeric_limits<double>::infinity()) {}

double PlateauScheduler::step(double metric) {
  if (metric < best_ * (1.0 - threshold_)) {
    best_ = metric;
    bad_epochs_ = 0;
  } else {
    ++bad_epochs_;
  }
  if (bad_epochs_ > patience_) {
    const double next = std::max(lr_ * factor_, min_lr_);
    if (lr_ - next > 1e-12) {
      lr_ = next;
      ++reductions_;
    }
    bad_epochs_ = 0;
  }
  return lr_;
}

}  // namespace gtc

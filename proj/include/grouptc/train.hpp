#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "grouptc/action.hpp"
#include "grouptc/tc.hpp"

namespace gtc {

enum class Variant { Max, Tc };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& text);

struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s, double fill = 0.0);
  std::size_t size() const { return data.size(); }
};

/// G-Conv block -> {ReLU + max pool | TC + standardisation} -> 3 x (linear,
/// batch norm, ELU) -> linear. Batch norm after the convolution normalises each
/// channel over the batch and group axes.
class Model {
 public:
  Model(PermutationAction action, Variant variant, int channels, int n_classes, std::array<int, 3> hidden,
        std::uint64_t seed);

  const PermutationAction& action() const { return action_; }
  const SymmetryClasses& classes() const { return classes_; }
  Variant variant() const { return variant_; }
  int channels() const { return channels_; }
  int n_classes() const { return n_classes_; }
  const std::array<int, 3>& hidden() const { return hidden_; }
  /// Width of the pooled representation fed to the MLP.
  int features() const;

  struct Named {
    std::string name;
    Tensor* tensor;
  };
  struct ConstNamed {
    std::string name;
    const Tensor* tensor;
  };
  std::vector<Named> parameters();
  std::vector<ConstNamed> parameters() const;
  std::vector<Named> buffers();
  std::vector<ConstNamed> buffers() const;

  std::size_t parameter_count() const;

  // Learnable tensors.
  Tensor conv;                   // K x |Omega|
  Tensor conv_gamma, conv_beta;  // K
  std::array<Tensor, 4> weight;  // [out, in]
  std::array<Tensor, 4> bias;
  std::array<Tensor, 3> bn_gamma, bn_beta;
  // Running statistics.
  Tensor conv_mean, conv_var;
  Tensor feat_mean, feat_var;  // used by the tc variant only
  std::array<Tensor, 3> bn_mean, bn_var;

 private:
  PermutationAction action_;
  SymmetryClasses classes_;
  Variant variant_;
  int channels_;
  int n_classes_;
  std::array<int, 3> hidden_;
};

/// Exact parameter count of a model with the given shape, without building it.
std::size_t parameter_count(Variant variant, int domain_size, int group_order, int tc_classes, int channels,
                            int n_classes, const std::array<int, 3>& hidden);

/// First hidden width for the max variant whose total parameter count is
/// closest to the tc variant with `hidden`.
int matched_max_width(const PermutationAction& action, int channels, int n_classes, const std::array<int, 3>& hidden);

enum class Mode { Train, Eval };

constexpr double kBatchNormEps = 1e-5;
constexpr double kBatchNormMomentum = 0.1;

using Matrix = Eigen::MatrixXd;

/// Everything the backward pass needs.
struct ForwardCache {
  Mode mode = Mode::Train;
  int batch = 0;
  Matrix inputs;                  // B x |Omega|
  std::vector<double> conv_out;   // B x K x |G|
  std::vector<double> conv_norm;  // normalised (x_hat), same layout
  std::vector<double> conv_act;   // after affine (+ ReLU for max)
  std::vector<double> conv_mean, conv_var;
  std::vector<int> argmax;  // B x K (max variant)
  Matrix pooled;            // B x F before standardisation
  std::vector<double> feat_mean, feat_var;
  Matrix representation;  // B x F, input of the MLP
  std::array<Matrix, 3> pre, norm, post;
  std::array<std::vector<double>, 3> bn_mean, bn_var;
  Matrix logits;
};

/// Runs the network on a batch (rows of `inputs`). Never mutates the model.
/// With `through_mlp` false the pass stops at the representation.
ForwardCache forward(const Model& model, const Matrix& inputs, Mode mode, bool through_mlp = true);

/// Moves the running statistics toward the batch statistics of a train-mode pass.
void update_running_stats(Model& model, const ForwardCache& cache);

struct Gradients {
  std::vector<std::vector<double>> params;  // aligned with Model::parameters()
  Matrix inputs;                            // B x |Omega|
};

/// Reverse pass given dL/dlogits and optionally dL/drepresentation. An empty
/// `dlogits` skips the MLP (its parameter gradients are left empty).
Gradients backward(const Model& model, const ForwardCache& cache, const Matrix& dlogits,
                   const Matrix* drepresentation = nullptr);

struct LossResult {
  double loss = 0.0;
  int correct = 0;
  Gradients grads;
};

/// Mean cross-entropy over the batch and its gradients.
LossResult loss_and_gradients(const Model& model, const Matrix& inputs, const std::vector<int>& labels,
                              Mode mode = Mode::Train, ForwardCache* cache_out = nullptr);

double cross_entropy(const Matrix& logits, const std::vector<int>& labels, Matrix* dlogits, int* correct);

/// Denominator floor of the gradient-check ratio. Biases feeding a train-mode
/// batch norm have an exactly zero gradient, where central differences only
/// return rounding noise of order 1e-11.
constexpr double kGradCheckFloor = 1e-6;

struct GradCheckEntry {
  std::string name;
  double relative_error = 0.0;  // ||analytic - numeric|| / max(||numeric||, kGradCheckFloor)
};

/// Central differences (step 1e-5) for every parameter tensor in train mode.
std::vector<GradCheckEntry> gradient_check(const Model& model, const Matrix& inputs, const std::vector<int>& labels,
                                           double step = 1e-5);

/// Relative error of the reduced-TC backward against central differences for
/// the scalar loss sum_r w[r] T(rep_r).
double tc_layer_gradient_check(const FiniteGroup& group, const SymmetryClasses& classes, std::span<const double> theta,
                               std::span<const double> weights, double step = 1e-5);

struct GradCheckRow {
  int config = 0;
  std::string name;  // parameter name, "input", or "tc_layer"
  double relative_error = 0.0;
};

/// `configs` random small models (grid of side 3, or cube of side 2 for O/Oh)
/// with random batches; every parameter tensor is checked, plus the TC layer
/// on its own for the tc variant.
std::vector<GradCheckRow> random_gradient_checks(const GroupSpec& group, Variant variant, int configs,
                                                 std::uint64_t seed);

std::string gradient_checks_to_csv(const std::vector<GradCheckRow>& rows);

struct TrainConfig {
  double lr = 5e-5;
  double weight_decay = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double plateau_factor = 0.5;
  int plateau_patience = 2;
  double plateau_threshold = 1e-4;
  double min_lr = 1e-5;
  int batch_size = 32;
  int epochs = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Learning-rate schedule used for the desk-scale experiments (small data, few epochs).
TrainConfig desk_train_config();

/// Adam with bias correction and decoupled weight decay.
class Adam {
 public:
  Adam(const std::vector<std::size_t>& sizes, const TrainConfig& config);
  void step(const std::vector<Tensor*>& params, const std::vector<std::vector<double>>& grads, double lr);
  int steps() const { return t_; }

 private:
  TrainConfig config_;
  std::vector<std::vector<double>> m_, v_;
  int t_ = 0;
};

/// Reduce-on-plateau in "min" mode with a relative improvement threshold.
class PlateauScheduler {
 public:
  PlateauScheduler(double lr, double factor, int patience, double threshold, double min_lr);
  /// Feeds one epoch's validation metric; returns the learning rate to use next.
  double step(double metric);
  double lr() const { return lr_; }
  int reductions() const { return reductions_; }

 private:
  double lr_, factor_, threshold_, min_lr_;
  int patience_;
  double best_;
  int bad_epochs_ = 0;
  int reductions_ = 0;
};

struct Split {
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;
  std::vector<int> elements;  // group element applied to each sample (-1 if unknown)

  std::size_t size() const { return inputs.size(); }
  Matrix matrix(const std::vector<std::size_t>& rows) const;
};

struct Dataset {
  GroupSpec group;
  DomainShape shape;
  int n_classes = 0;
  std::vector<std::vector<double>> prototypes;  // untransformed pattern per class (synthetic only)
  Split train, val, test;
};

/// Rebuilds the permutation action a dataset was transformed with.
PermutationAction dataset_action(const Dataset& data);

struct SynthOptions {
  int n_classes = 10;
  int n_per_class = 50;  // split 80/20 into train/val
  int n_test_per_class = 20;
  int grid = 9;
  double noise = 0.0;   // std of additive Gaussian noise after the transform
  double jitter = 0.0;  // probability that a sprite pixel moves to a random neighbour
  std::uint64_t seed = 0;
};

/// The D4 9 x 9 task used for the desk-scale comparison.
SynthOptions desk_synth_options();

/// Random sprites in [0, 1] per class, each sample moved by a uniformly
/// random group element. Square grids for C_n/D_n, cubes for O/Oh.
Dataset synth_dataset(const GroupSpec& group, const SynthOptions& options);

struct IdxImages {
  int count = 0, rows = 0, cols = 0;
  std::vector<std::uint8_t> pixels;
};

IdxImages parse_idx_images(const std::string& bytes);
std::vector<int> parse_idx_labels(const std::string& bytes);

/// Nearest-neighbour resize to n x n: output (i, j) reads (i*rows/n, j*cols/n), scaled to [0, 1].
std::vector<double> downsample_nearest(std::span<const std::uint8_t> image, int rows, int cols, int n);

/// Reads an IDX image/label pair, keeps the first `limit` samples, resizes them
/// to n x n and moves each by a random D4 element. 80/20 train/val split of the
/// first 80% of samples, the rest is the test split.
Dataset load_idx_dataset(const std::string& images_path, const std::string& labels_path, int limit, int n,
                         std::uint64_t seed);

struct LogRow {
  int epoch = 0;
  std::string split;
  double loss = 0.0;
  double accuracy = 0.0;
  double lr = 0.0;
};

std::string training_log_to_csv(const std::vector<LogRow>& rows);

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

EvalResult evaluate(const Model& model, const Split& split, int batch_size = 256);

struct TrainResult {
  std::vector<LogRow> log;
  EvalResult test;
};

TrainResult train_model(Model& model, const Dataset& data, const TrainConfig& config);

struct ComparisonOptions {
  TrainConfig config;
  int channels = 16;
  std::array<int, 3> hidden{64, 64, 64};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3};
  int threads = 1;
};

struct RunResult {
  Variant variant = Variant::Max;
  std::uint64_t seed = 0;
  double test_accuracy = 0.0;
  std::size_t parameters = 0;
};

struct ComparisonReport {
  std::vector<RunResult> runs;
  std::size_t max_parameters = 0;
  std::size_t tc_parameters = 0;
  int max_first_width = 0;

  double mean(Variant v) const;
  double stddev(Variant v) const;  // sample standard deviation over seeds
  double parameter_gap() const;    // |max - tc| / tc
};

ComparisonReport run_comparison(const Dataset& data, const ComparisonOptions& options);
std::string comparison_to_csv(const ComparisonReport& report);

/// Checkpoint JSON; doubles are stored as shortest round-trip decimal strings.
nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers. Callers write only
/// to slot i, so results do not depend on the worker count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace gtc

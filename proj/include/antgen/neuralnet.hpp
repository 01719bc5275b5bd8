#pragma once

// Minimal feed-forward network stack: dense layers with optional batch
// normalization, fixed activation vocabulary, analytic backpropagation,
// Adam and SGD. Everything runs in double precision.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "antgen/matrix.hpp"

namespace antgen::nn {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Activation { relu, leaky_relu, sigmoid, none };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct LayerSpec {
  std::size_t in = 1;
  std::size_t out = 1;
  bool batchnorm = false;
  bool bias = true;
  Activation activation = Activation::none;
  double slope = 0.2;  // leaky-relu only
};

inline constexpr double kBatchNormEps = 1e-8;
inline constexpr double kBatchNormMomentum = 0.1;

struct DenseLayer {
  LayerSpec spec;
  Matrix weight;  // out x in
  std::vector<double> bias;
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
};

struct MlpModel {
  std::vector<DenseLayer> layers;

  std::size_t input_width() const { return layers.front().spec.in; }
  std::size_t output_width() const { return layers.back().spec.out; }
  std::size_t parameter_count() const;
  bool all_finite() const;
  std::vector<LayerSpec> specs() const;

  bool operator==(const MlpModel& other) const;
};

// Analytic parameter count for a width chain.
std::size_t parameter_count(std::span<const LayerSpec> specs);

// Throws ShapeError unless widths chain and are >= 1.
void validate_specs(std::span<const LayerSpec> specs);

// Kaiming-uniform weights (bound sqrt(6 / fan_in)), zero biases,
// batchnorm scale 1 / shift 0, running mean 0 / var 1.
MlpModel init_model(std::span<const LayerSpec> specs, std::uint64_t seed);

enum class Mode { train, eval };

struct LayerTrace {
  Matrix input;
  Matrix linear;  // x W^T + b
  Matrix xhat;    // normalized linear output (batchnorm layers)
  std::vector<double> mean;
  std::vector<double> var;  // biased batch variance in train mode
  std::vector<double> inv_std;
  Matrix pre_activation;
  Matrix output;
};

struct ForwardTrace {
  Mode mode = Mode::eval;
  std::vector<LayerTrace> layers;

  const Matrix& output() const { return layers.back().output; }
  const Matrix& logits() const { return layers.back().pre_activation; }
};

ForwardTrace forward_trace(const MlpModel& model, const Matrix& batch, Mode mode);
Matrix forward(const MlpModel& model, const Matrix& batch, Mode mode);

// Folds the batch statistics of a train-mode trace into the running
// statistics (momentum 0.1, unbiased variance).
void update_running_stats(MlpModel& model, const ForwardTrace& trace,
                          double momentum = kBatchNormMomentum);

struct LayerGrad {
  Matrix weight;
  std::vector<double> bias;
  std::vector<double> gamma;
  std::vector<double> beta;
};

struct GradientSet {
  std::vector<LayerGrad> layers;
  Matrix input;  // dL/d(batch)
  double loss = 0.0;

  double norm() const;
};

// Where the incoming gradient attaches: the network output or the last
// layer's pre-activation (logit).
enum class Seed { output, logits };

GradientSet backward(const MlpModel& model, const ForwardTrace& trace, const Matrix& upstream,
                     Seed seed = Seed::output);

enum class Loss {
  bce,                      // -mean(y log p + (1-y) log(1-p))
  generator,                // mean(log(1 - p))
  generator_nonsaturating,  // -mean(log p)
};

// Loss value and its gradient w.r.t. the logits of a single-output sigmoid
// head. targets is only read for bce.
struct LossValue {
  double value = 0.0;
  Matrix d_logits;
};
LossValue loss_from_logits(const Matrix& logits, Loss loss, std::span<const double> targets);

// Exact gradient of the scalar mean loss for a model whose last layer is a
// single sigmoid unit. Throws DivergenceError on a non-finite loss.
GradientSet grad(const MlpModel& model, const Matrix& batch, Loss loss,
                 std::span<const double> targets, Mode mode = Mode::train);

// Flat views over parameters and matching gradients, in a fixed order.
struct ParamView {
  std::span<double> values;
  bool is_weight = false;
};
std::vector<ParamView> parameter_views(MlpModel& model);
std::vector<std::span<const double>> gradient_views(const GradientSet& g);

struct OptimizerConfig {
  enum class Kind { adam, sgd };
  Kind kind = Kind::adam;
  double lr = 1e-5;
  double weight_decay = 0.0;
  bool decoupled_decay = true;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static OptimizerConfig adam(double lr, double weight_decay = 0.0, bool decoupled = true);
  static OptimizerConfig sgd(double lr);
};

struct TrainConfig {
  OptimizerConfig optimizer;
  std::size_t batch_size = 1;
  std::size_t max_epochs = 1000;
  std::size_t max_steps = 0;  // 0: unlimited
  std::uint64_t seed = 0;

  // Adam lr 1e-5 with decay 0.05, batch 1, up to 1000 epochs.
  static TrainConfig discriminator_defaults();
  // SGD lr 1e-4, batch 500, up to 30000 epochs.
  static TrainConfig generator_defaults();

  void validate() const;
};

class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg) : cfg_(cfg) {}

  void step(MlpModel& model, const GradientSet& g);
  std::size_t steps() const { return t_; }
  const OptimizerConfig& config() const { return cfg_; }

 private:
  OptimizerConfig cfg_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

inline double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

nlohmann::json to_json(const MlpModel& model);
MlpModel model_from_json(const nlohmann::json& j);

}  // namespace antgen::nn
